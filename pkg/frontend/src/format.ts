/**
 * Display rounding. Distances render as whole meters and angles as whole
 * degrees; everything else keeps one decimal. The underlying values are
 * always the wire payload — these helpers only round for display.
 */

export function metres(value: number): string {
  return `${Math.round(value)} m`;
}

export function degrees(value: number): string {
  return `${Math.round(value)}°`;
}

/** Courses display in [0, 360). */
export function courseDegrees(value: number): string {
  const wrapped = ((Math.round(value) % 360) + 360) % 360;
  return `${wrapped.toString().padStart(3, "0")}°`;
}

export function speed(value: number): string {
  return `${value.toFixed(1)} m/s`;
}

export function seconds(value: number): string {
  return `${Math.round(value)} s`;
}

export function clock(simSeconds: number): string {
  const whole = Math.floor(simSeconds);
  const mm = Math.floor(whole / 60).toString().padStart(2, "0");
  const ss = (whole % 60).toString().padStart(2, "0");
  return `${mm}:${ss}`;
}

/** "crossing_give_way" → "crossing give way" for table cells. */
export function encounterLabel(value: string): string {
  return value.replace(/_/g, " ");
}
