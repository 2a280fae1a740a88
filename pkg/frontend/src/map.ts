/**
 * Canvas chart: flat local-coordinate map, north up, scale fitted to the
 * scenario extent once on load and held fixed afterwards.
 */
import { everyNth, Extent, extentOf, fitTransform, padExtent, project, Transform } from "./geometry";
import { ObstacleWire, VesselWire } from "./protocol";
import { DOT_INTERVAL_STATES, trajectoryLayers, ViewModel } from "./viewmodel";

const GRID_SPACING_M = 500;
const EXTENT_MARGIN_M = 150;

/** Everything that should stay on screen for the whole run. */
export function sceneExtent(vm: ViewModel): Extent {
  const points: Array<[number, number]> = [];
  for (const wp of vm.route) points.push([wp.north, wp.east]);
  points.push([vm.ownship.north, vm.ownship.east]);
  for (const ob of vm.obstacles) {
    points.push([ob.north, ob.east]);
    for (const p of ob.predicted) points.push(p);
  }
  const extent = extentOf(points);
  // A scenario always has a route; this fallback never fires in practice.
  return padExtent(extent ?? { minNorth: -500, maxNorth: 500, minEast: -500, maxEast: 500 }, EXTENT_MARGIN_M);
}

export class ChartRenderer {
  private transform: Transform | null = null;
  private fittedScenario: string | null = null;

  constructor(private readonly canvas: HTMLCanvasElement) {}

  render(vm: ViewModel): void {
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) return;
    const { width, height } = this.canvas;
    if (this.transform === null || this.fittedScenario !== vm.scenarioId) {
      this.transform = fitTransform(sceneExtent(vm), width, height);
      this.fittedScenario = vm.scenarioId;
    }
    const t = this.transform;

    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#0b1020";
    ctx.fillRect(0, 0, width, height);
    this.drawGrid(ctx, t, width, height);
    this.drawRoute(ctx, t, vm);
    for (const layer of trajectoryLayers(vm)) {
      this.drawTrajectory(ctx, t, layer.points, layer.color);
    }
    for (const ob of vm.obstacles) this.drawObstacle(ctx, t, ob);
    this.drawOwnship(ctx, t, vm.ownship);
  }

  private drawGrid(ctx: CanvasRenderingContext2D, t: Transform, width: number, height: number): void {
    ctx.strokeStyle = "rgba(120, 140, 180, 0.12)";
    ctx.lineWidth = 1;
    const spanEast = width / t.scale;
    const spanNorth = height / t.scale;
    const firstEast = Math.floor((t.midEast - spanEast / 2) / GRID_SPACING_M) * GRID_SPACING_M;
    const firstNorth = Math.floor((t.midNorth - spanNorth / 2) / GRID_SPACING_M) * GRID_SPACING_M;
    for (let e = firstEast; e <= t.midEast + spanEast / 2; e += GRID_SPACING_M) {
      const [x] = project(t, t.midNorth, e);
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, height);
      ctx.stroke();
    }
    for (let n = firstNorth; n <= t.midNorth + spanNorth / 2; n += GRID_SPACING_M) {
      const [, y] = project(t, n, t.midEast);
      ctx.beginPath();
      ctx.moveTo(0, y);
      ctx.lineTo(width, y);
      ctx.stroke();
    }
  }

  private drawRoute(ctx: CanvasRenderingContext2D, t: Transform, vm: ViewModel): void {
    if (vm.route.length === 0) return;
    ctx.strokeStyle = "rgba(140, 170, 220, 0.5)";
    ctx.lineWidth = 1.5;
    ctx.setLineDash([8, 8]);
    ctx.beginPath();
    vm.route.forEach((wp, i) => {
      const [x, y] = project(t, wp.north, wp.east);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
    ctx.setLineDash([]);
    for (const wp of vm.route) {
      const [x, y] = project(t, wp.north, wp.east);
      ctx.beginPath();
      ctx.arc(x, y, 4, 0, Math.PI * 2);
      ctx.strokeStyle = "rgba(140, 170, 220, 0.8)";
      ctx.stroke();
    }
  }

  private drawTrajectory(
    ctx: CanvasRenderingContext2D,
    t: Transform,
    points: Array<[number, number]>,
    color: string,
  ): void {
    if (points.length === 0) return;
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.25;
    ctx.beginPath();
    points.forEach(([n, e], i) => {
      const [x, y] = project(t, n, e);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
    // Dots at fixed time spacing: gaps scale with speed along the path.
    ctx.fillStyle = color;
    for (const [n, e] of everyNth(points, DOT_INTERVAL_STATES)) {
      const [x, y] = project(t, n, e);
      ctx.beginPath();
      ctx.arc(x, y, 2.5, 0, Math.PI * 2);
      ctx.fill();
    }
  }

  private drawOwnship(ctx: CanvasRenderingContext2D, t: Transform, own: VesselWire): void {
    this.drawVesselMarker(ctx, t, own.north, own.east, own.course_deg, "#7dd3fc", 9);
  }

  private drawObstacle(ctx: CanvasRenderingContext2D, t: Transform, ob: ObstacleWire): void {
    ctx.fillStyle = "rgba(255, 99, 99, 0.9)";
    for (const [n, e] of ob.predicted) {
      const [x, y] = project(t, n, e);
      ctx.beginPath();
      ctx.arc(x, y, 1.5, 0, Math.PI * 2);
      ctx.fill();
    }
    this.drawVesselMarker(ctx, t, ob.north, ob.east, ob.course_deg, "#f87171", 8);
    const [x, y] = project(t, ob.north, ob.east);
    ctx.fillStyle = "rgba(230, 235, 245, 0.85)";
    ctx.font = "11px system-ui, sans-serif";
    ctx.fillText(ob.id, x + 10, y - 8);
  }

  private drawVesselMarker(
    ctx: CanvasRenderingContext2D,
    t: Transform,
    north: number,
    east: number,
    courseDeg: number,
    color: string,
    size: number,
  ): void {
    const [x, y] = project(t, north, east);
    ctx.save();
    ctx.translate(x, y);
    ctx.rotate((courseDeg * Math.PI) / 180);
    ctx.beginPath();
    ctx.moveTo(0, -size);
    ctx.lineTo(size * 0.6, size);
    ctx.lineTo(0, size * 0.55);
    ctx.lineTo(-size * 0.6, size);
    ctx.closePath();
    ctx.fillStyle = color;
    ctx.fill();
    ctx.restore();
  }
}
