/**
 * DOM bootstrap: scenario picker, then the live console for one session.
 * All state flows through the controller; this file only renders it.
 */
import { makeApi } from "./api";
import { SessionController } from "./controller";
import { clock, seconds, speed } from "./format";
import { ChartRenderer } from "./map";
import { CHARACTERISTICS, Characteristic, ScenarioSummary } from "./protocol";
import { connectEvents } from "./stream";
import {
  actionRows,
  controlsState,
  explanationEntries,
  targetRows,
  TRAJECTORY_COLORS,
  TRAJECTORY_LABELS,
} from "./viewmodel";
import type { ViewModel } from "./viewmodel";

const api = makeApi();
const root = document.getElementById("app") as HTMLElement;

type Child = Node | string;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  for (const child of children) node.append(child);
  return node;
}

function characteristicLabel(value: string): string {
  return value.replace(/_/g, " ");
}

// ---------------------------------------------------------------- picker

async function showPicker(): Promise<void> {
  root.replaceChildren(el("p", { class: "muted" }, ["Loading scenarios…"]));
  let scenarios: ScenarioSummary[];
  try {
    scenarios = await api.listScenarios();
  } catch (err) {
    root.replaceChildren(el("p", { class: "notice" }, [`Cannot reach the session service: ${String(err)}`]));
    return;
  }
  const cards = scenarios.map((sc) =>
    el("button", { class: "scenario-card" }, [
      el("strong", {}, [sc.title]),
      el("span", { class: "muted" }, [sc.description]),
      el("span", { class: "tag" }, [
        `${sc.obstacles} contact${sc.obstacles === 1 ? "" : "s"} · alternative: ${characteristicLabel(sc.foil_characteristic)}`,
      ]),
    ]),
  );
  cards.forEach((card, i) => {
    card.addEventListener("click", () => {
      const chosen = scenarios[i];
      if (chosen !== undefined) void openSession(chosen.id);
    });
  });
  root.replaceChildren(
    el("header", { class: "top" }, [el("h1", {}, ["bridgewatch"]), el("p", { class: "muted" }, ["Pick an encounter to supervise."])]),
    el("div", { class: "picker" }, cards),
  );
}

// --------------------------------------------------------------- session

async function openSession(scenarioId: string): Promise<void> {
  const snapshot = await api.createSession(scenarioId);
  const controller = new SessionController(api, snapshot);

  const canvas = el("canvas", { width: "860", height: "860", class: "chart" });
  const chart = new ChartRenderer(canvas);
  const header = el("div", { class: "session-header" });
  const decisionPanel = el("section", { class: "panel" });
  const trafficPanel = el("section", { class: "panel" });
  const playbackPanel = el("section", { class: "panel" });
  const noticeLine = el("p", { class: "notice", role: "status" });

  const back = el("button", { class: "ghost" }, ["← scenarios"]);
  back.addEventListener("click", () => {
    closeStream();
    void showPicker();
  });

  root.replaceChildren(
    el("header", { class: "top" }, [back, header]),
    el("main", { class: "layout" }, [
      el("div", { class: "chart-wrap" }, [canvas, legend()]),
      el("div", { class: "side" }, [decisionPanel, trafficPanel, playbackPanel, noticeLine]),
    ]),
  );

  let frame = 0;
  const renderSoon = () => {
    if (frame !== 0) return;
    frame = requestAnimationFrame(() => {
      frame = 0;
      renderAll();
    });
  };
  controller.subscribe(renderSoon);

  const closeStream = connectEvents(snapshot.session_id, snapshot.seq, {
    onRecord: (record) => controller.handleRecord(record),
    onState: (state) => controller.handleConnection(state),
  });

  function renderAll(): void {
    const vm = controller.vm;
    chart.render(vm);
    renderHeader(vm);
    renderDecision(vm);
    renderTraffic(vm);
    renderPlayback(vm);
    noticeLine.textContent = vm.notice ?? "";
    noticeLine.classList.toggle("hidden", vm.notice === null);
  }

  function renderHeader(vm: ViewModel): void {
    header.replaceChildren(
      el("h1", {}, [vm.scenarioTitle]),
      el("span", { class: "clock" }, [`t = ${clock(vm.clock)}`]),
      badge(vm.playback, vm.playback === "playing" ? "ok" : ""),
      badge(vm.decision, vm.decision === "pending" ? "" : "accent"),
      badge(vm.connection, vm.connection === "live" ? "ok" : "warn"),
    );
  }

  function renderDecision(vm: ViewModel): void {
    const controls = controlsState(vm);
    const rows = actionRows(vm);
    const boxes = explanationEntries(vm);

    const table = el("table", { class: "actions" }, [
      el("thead", {}, [el("tr", {}, [el("th", {}, ["maneuver"]), el("th", {}, ["course"]), el("th", {}, ["speed"]), el("th", {}, ["cost"])])]),
    ]);
    const body = el("tbody");
    for (const row of rows) {
      const tr = el("tr", { "data-key": row.key }, [
        el("td", {}, [swatch(row.color), row.label]),
        el("td", {}, [row.courseText]),
        el("td", {}, [row.speedText]),
        el("td", { class: "muted" }, [row.totalText]),
      ]);
      body.append(tr);
      for (const box of boxes.filter((b) => b.anchor === row.key)) {
        const cell = el("td", { colspan: "4" }, [
          el("div", { class: "explanation", style: `border-color: ${box.tint}` }, [
            el("span", { class: "muted small" }, [
              box.selectedCost === null ? "no decisive cost" : `decisive cost: ${box.selectedCost}`,
            ]),
            el("p", {}, [box.text]),
          ]),
        ]);
        body.append(el("tr", { class: "explanation-row", "data-anchor": box.anchor }, [cell]));
      }
    }
    table.append(body);

    const picker = el("select", { class: "characteristic" });
    for (const c of CHARACTERISTICS) {
      const option = el("option", { value: c }, [characteristicLabel(c)]);
      if (c === controls.characteristic) option.setAttribute("selected", "selected");
      picker.append(option);
    }
    picker.toggleAttribute("disabled", vm.decisionPoint === null);
    picker.addEventListener("change", () => {
      void controller.pickCharacteristic(picker.value as Characteristic);
    });

    const accept = el("button", { class: "accept" }, ["Accept"]);
    const decline = el("button", { class: "decline" }, ["Decline"]);
    accept.toggleAttribute("disabled", !controls.decisionEnabled);
    decline.toggleAttribute("disabled", !controls.decisionEnabled);
    accept.addEventListener("click", () => void controller.decide("accepted"));
    decline.addEventListener("click", () => void controller.decide("declined"));

    decisionPanel.replaceChildren(
      el("h2", {}, ["Maneuver decision"]),
      el("p", { class: "muted small" }, [
        controls.triggerTime === null
          ? "No deviation from the route is proposed."
          : `Planner proposes leaving the route at t = ${seconds(controls.triggerTime)}.`,
      ]),
      table,
      el("div", { class: "controls-row" }, [
        el("label", { class: "muted small" }, ["alternative characteristic "]),
        picker,
        accept,
        decline,
      ]),
    );
  }

  function renderTraffic(vm: ViewModel): void {
    const table = el("table", {}, [
      el("thead", {}, [
        el("tr", {}, [el("th", {}, ["contact"]), el("th", {}, ["bearing"]), el("th", {}, ["range"]), el("th", {}, ["CPA"]), el("th", {}, ["TCPA"]), el("th", {}, ["encounter"])]),
      ]),
    ]);
    const body = el("tbody");
    for (const row of targetRows(vm)) {
      body.append(
        el("tr", {}, [
          el("td", {}, [row.id]),
          el("td", {}, [row.bearingText]),
          el("td", {}, [row.rangeText]),
          el("td", {}, [row.cpaText]),
          el("td", {}, [row.cpaTimeText]),
          el("td", {}, [row.encounterText]),
        ]),
      );
    }
    table.append(body);
    trafficPanel.replaceChildren(
      el("h2", {}, ["Traffic"]),
      vm.obstacles.length > 0 ? table : el("p", { class: "muted" }, ["No contacts."]),
      el("p", { class: "muted small" }, [`ownship ${speed(vm.ownship.speed)}, minimum watch range 50 m`]),
    );
  }

  function renderPlayback(vm: ViewModel): void {
    const play = el("button", {}, [vm.playback === "playing" ? "Pause" : "Play"]);
    play.addEventListener("click", () => void (vm.playback === "playing" ? controller.pause() : controller.play()));
    const rewind = el("button", {}, ["⏮ Rewind"]);
    rewind.addEventListener("click", () => void controller.seek(0));
    const seekInput = el("input", { type: "number", min: "0", step: "5", value: String(Math.floor(vm.clock)) });
    const seekGo = el("button", {}, ["Seek"]);
    seekGo.addEventListener("click", () => {
      const t = Number(seekInput.value);
      if (Number.isFinite(t) && t >= 0) void controller.seek(t);
    });
    const trace = el("a", { href: api.traceUrl(vm.sessionId), download: `${vm.scenarioId}.ndjson` }, ["download trace"]);
    playbackPanel.replaceChildren(
      el("h2", {}, ["Playback"]),
      el("div", { class: "controls-row" }, [play, rewind, seekInput, seekGo, trace]),
    );
  }

  function legend(): HTMLElement {
    const entry = (color: string, label: string) =>
      el("span", { class: "legend-entry" }, [swatch(color), label]);
    return el("div", { class: "legend" }, [
      entry("rgba(140, 170, 220, 0.8)", "route"),
      entry("#7dd3fc", "ownship"),
      entry("#f87171", "traffic"),
      entry(TRAJECTORY_COLORS.fact, TRAJECTORY_LABELS.fact),
      entry(TRAJECTORY_COLORS.alternative, TRAJECTORY_LABELS.alternative),
      entry(TRAJECTORY_COLORS.nominal, TRAJECTORY_LABELS.nominal),
    ]);
  }

  function badge(text: string, tone: string): HTMLElement {
    return el("span", { class: `badge ${tone}`.trim() }, [text]);
  }

  function swatch(color: string): HTMLElement {
    const s = el("span", { class: "swatch" });
    s.style.backgroundColor = color;
    return s;
  }

  renderAll();
}

void showPicker();
