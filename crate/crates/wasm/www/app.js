import init, { Explorer, discretize } from "./pkg/tirpmine_wasm.js";

const EXAMPLE = `entity_id,concept_id,value_id,start,end
1,Med,High,0,10
1,HGB,Low,40,50
2a,Med,High,0,10
2a,HGB,High,20,30
2a,HGB,Low,40,50
2b,Med,High,0,10
2b,Med,Low,20,30
2b,HGB,Low,40,50
`;

const $ = (id) => document.getElementById(id);
const MODES = ["none", "ssac", "csac", "lsac"];

let explorer = null;
let pattern = null;
let chosenBars = [];

function el(tag, attrs = {}, ...children) {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v;
    else if (k.startsWith("on")) node.addEventListener(k.slice(2), v);
    else node.setAttribute(k, v);
  }
  for (const c of children) node.append(c);
  return node;
}

function table(head, rows) {
  return el("table", {},
    el("tr", {}, ...head.map((h) => el("th", {}, h))),
    ...rows);
}

function showError(target, e) {
  target.replaceChildren(el("div", { class: "err" }, String(e.message ?? e)));
}

function useExplorer(x) {
  explorer?.free();
  explorer = x;
  pattern = null;
  $("pattern-label").textContent = "no pattern selected";
  const summary = JSON.parse(explorer.summary());
  $("entity").replaceChildren(...summary.entities.map((e) => el("option", { value: e.id }, `${e.id} (${e.intervals})`)));
  $("mine-out").textContent = `${summary.entities.length} entities, ${summary.symbols} symbols`;
  drawTimeline();
}

function load() {
  try {
    useExplorer(new Explorer($("csv").value));
  } catch (e) {
    showError($("mine-out"), e);
  }
}

function generate() {
  try {
    const x = Explorer.generate(Number($("seed").value) >>> 0, Number($("rate").value));
    $("csv").value = x.csv();
    useExplorer(x);
  } catch (e) {
    showError($("mine-out"), e);
  }
}

function runMining() {
  if (!explorer) return;
  const out = $("mine-out");
  try {
    const t0 = performance.now();
    const res = JSON.parse(explorer.mine($("minvs").value, $("relations").value, $("sac").value, Number($("maxsize").value)));
    const ms = (performance.now() - t0).toFixed(1);
    const counts = table(MODES, [el("tr", {}, ...MODES.map((m) => el("td", {}, String(res.counts[m]))))]);
    const rows = res.patterns.map((p) => {
      const tr = el("tr", { class: "pick" },
        el("td", {}, p.symbols.join(", ")),
        el("td", {}, p.relations),
        el("td", {}, `${p.supporting}/${p.total}`),
        el("td", {}, p.mean_hor_sup.toFixed(2)));
      tr.addEventListener("click", () => {
        for (const r of out.querySelectorAll("tr.selected")) r.classList.remove("selected");
        tr.classList.add("selected");
        pattern = p;
        $("pattern-label").textContent = `pattern ${p.symbols.join(", ")} [${p.relations}]`;
        drawTimeline();
      });
      return tr;
    });
    out.replaceChildren(
      el("p", {}, `Pattern counts per adjacency criterion (all sizes; ${ms} ms for the five mining runs):`),
      counts,
      el("p", {}, `${rows.length} multi-interval patterns under ${$("sac").value}; click one to inspect it:`),
      table(["symbols", "relations", "support", "mean instances"], rows));
  } catch (e) {
    showError(out, e);
  }
}

function drawTimeline() {
  const svg = $("timeline");
  svg.replaceChildren();
  $("instances").replaceChildren();
  $("pair-out").replaceChildren();
  chosenBars = [];
  if (!explorer || !$("entity").value) return;
  let data;
  try {
    data = pattern
      ? JSON.parse(explorer.timeline($("entity").value, pattern.symbols.join(","), pattern.relations))
      : { intervals: JSON.parse(explorer.intervals($("entity").value)), instances: [] };
  } catch (e) {
    showError($("instances"), e);
    return;
  }
  render(svg, data.intervals);
  if (!pattern) return;
  const rows = data.instances.map((inst, n) => {
    const tr = el("tr", { class: "pick" },
      el("td", {}, String(n + 1)),
      el("td", {}, inst.indices.join(", ")),
      ...MODES.map((m) => el("td", { class: inst.verdicts[m] ? "ok" : "bad" }, inst.verdicts[m] ? "kept" : "pruned")));
    tr.addEventListener("click", () => highlight(inst));
    return tr;
  });
  $("instances").replaceChildren(rows.length
    ? table(["#", "intervals", ...MODES], rows)
    : el("p", {}, "No instance of the selected pattern in this entity."));
}

function render(svg, intervals) {
  if (!intervals.length) return;
  const concepts = [...new Set(intervals.map((i) => i.concept))].sort();
  const lo = Math.min(...intervals.map((i) => i.start));
  const hi = Math.max(...intervals.map((i) => i.end));
  const width = svg.clientWidth || 900;
  const left = 90;
  const scale = (width - left - 20) / Math.max(hi - lo, 1);
  const rowH = 26;
  svg.setAttribute("height", String(concepts.length * rowH + 24));
  const ns = "http://www.w3.org/2000/svg";
  concepts.forEach((c, r) => {
    const t = document.createElementNS(ns, "text");
    t.setAttribute("x", "4");
    t.setAttribute("y", String(r * rowH + 17));
    t.textContent = c;
    svg.append(t);
  });
  for (const iv of intervals) {
    const r = concepts.indexOf(iv.concept);
    const rect = document.createElementNS(ns, "rect");
    rect.setAttribute("class", "iv");
    rect.setAttribute("x", String(left + (iv.start - lo) * scale));
    rect.setAttribute("y", String(r * rowH + 4));
    rect.setAttribute("width", String(Math.max((iv.end - iv.start) * scale, 3)));
    rect.setAttribute("height", "18");
    rect.dataset.index = iv.index;
    const title = document.createElementNS(ns, "title");
    title.textContent = `#${iv.index} ${iv.concept}=${iv.value} [${iv.start}, ${iv.end}]`;
    rect.append(title);
    rect.addEventListener("click", () => chooseBar(iv.index));
    svg.append(rect);
    const label = document.createElementNS(ns, "text");
    label.setAttribute("x", String(left + (iv.start - lo) * scale + 2));
    label.setAttribute("y", String(r * rowH + 17));
    label.textContent = iv.value;
    label.style.pointerEvents = "none";
    svg.append(label);
  }
  const axis = document.createElementNS(ns, "text");
  axis.setAttribute("x", String(left));
  axis.setAttribute("y", String(concepts.length * rowH + 18));
  axis.textContent = `${lo} … ${hi}`;
  svg.append(axis);
}

function highlight(inst) {
  for (const rect of $("timeline").querySelectorAll("rect.iv")) {
    const i = Number(rect.dataset.index);
    rect.classList.toggle("member", inst.indices.includes(i));
    rect.classList.toggle("blocker", inst.blockers.includes(i));
  }
}

function chooseBar(index) {
  chosenBars = chosenBars.length === 2 ? [index] : [...chosenBars, index];
  for (const rect of $("timeline").querySelectorAll("rect.iv")) {
    rect.classList.toggle("chosen", chosenBars.includes(Number(rect.dataset.index)));
  }
  if (chosenBars.length < 2) return;
  try {
    const p = JSON.parse(explorer.pair($("entity").value, chosenBars[0], chosenBars[1], 0));
    $("pair-out").replaceChildren(
      el("p", {}, `#${p.first} to #${p.second}: relation ${p.allen7 ?? "none"} (abstract ${p.abstract3 ?? "none"}), ` +
        (p.strict_gap ? `gap blocked by [${p.blockers.join(", ")}]` : "no gap")),
      table(MODES, [el("tr", {}, ...MODES.map((m) =>
        el("td", { class: p.admissible[m] ? "ok" : "bad" }, p.admissible[m] ? "adjacent" : "not adjacent")))]));
  } catch (e) {
    showError($("pair-out"), e);
  }
}

function runDiscretize() {
  const out = $("disc-out");
  try {
    const res = JSON.parse(discretize($("values").value, $("method").value === "td4c-kl" ? $("labels").value : "", $("method").value, Number($("bins").value)));
    const rows = Object.entries(res.counts).map(([cls, counts]) =>
      el("tr", {}, el("td", {}, cls), ...counts.map((c) => el("td", {}, String(c)))));
    out.replaceChildren(
      el("p", {}, `cutoffs: ${res.cutoffs.map((c) => +c.toFixed(4)).join(", ")}`),
      table(["class", ...res.states], rows));
  } catch (e) {
    showError(out, e);
  }
}

await init();
$("csv").value = EXAMPLE;
$("load").addEventListener("click", load);
$("gen").addEventListener("click", generate);
$("mine").addEventListener("click", runMining);
$("entity").addEventListener("change", drawTimeline);
$("discretize").addEventListener("click", runDiscretize);
load();
runMining();
runDiscretize();
