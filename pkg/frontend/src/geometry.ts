/**
 * North-up planar projection for the chart canvas.
 *
 * World coordinates are (north, east) meters; screen coordinates put east
 * along +x and north along -y (up). The scale is fitted once per scenario
 * from the route and traffic extent and then held fixed.
 */

export interface Extent {
  minNorth: number;
  maxNorth: number;
  minEast: number;
  maxEast: number;
}

export interface Transform {
  scale: number; // px per meter
  midNorth: number;
  midEast: number;
  centerX: number;
  centerY: number;
}

export function extentOf(points: Iterable<readonly [number, number]>): Extent | null {
  let minNorth = Infinity;
  let maxNorth = -Infinity;
  let minEast = Infinity;
  let maxEast = -Infinity;
  for (const [n, e] of points) {
    if (n < minNorth) minNorth = n;
    if (n > maxNorth) maxNorth = n;
    if (e < minEast) minEast = e;
    if (e > maxEast) maxEast = e;
  }
  if (!Number.isFinite(minNorth)) return null;
  return { minNorth, maxNorth, minEast, maxEast };
}

export function padExtent(extent: Extent, margin: number): Extent {
  return {
    minNorth: extent.minNorth - margin,
    maxNorth: extent.maxNorth + margin,
    minEast: extent.minEast - margin,
    maxEast: extent.maxEast + margin,
  };
}

export function fitTransform(extent: Extent, width: number, height: number): Transform {
  const spanNorth = Math.max(extent.maxNorth - extent.minNorth, 1e-9);
  const spanEast = Math.max(extent.maxEast - extent.minEast, 1e-9);
  return {
    scale: Math.min(width / spanEast, height / spanNorth),
    midNorth: (extent.minNorth + extent.maxNorth) / 2,
    midEast: (extent.minEast + extent.maxEast) / 2,
    centerX: width / 2,
    centerY: height / 2,
  };
}

export function project(t: Transform, north: number, east: number): [number, number] {
  return [
    t.centerX + (east - t.midEast) * t.scale,
    t.centerY - (north - t.midNorth) * t.scale,
  ];
}

/** Every n-th element, always including the first. */
export function everyNth<T>(items: readonly T[], n: number): T[] {
  if (n <= 0) throw new RangeError("n must be positive");
  return items.filter((_, index) => index % n === 0);
}

export function distance(a: readonly [number, number], b: readonly [number, number]): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}
