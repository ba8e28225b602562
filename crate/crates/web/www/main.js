import init, { searchDemo, discoveryCurves, plan } from "./pkg/xyz_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const fmt = (v, d = 4) => (v === null || v === undefined ? "n/a" : Number(v).toFixed(d));

function fail(el, e) {
  el.innerHTML = "";
  const span = document.createElement("span");
  span.className = "err";
  span.textContent = String(e);
  el.appendChild(span);
}

function runSearch() {
  const out = $("s-out");
  const table = $("s-hits");
  table.innerHTML = "";
  let r;
  const t0 = performance.now();
  try {
    r = JSON.parse(searchDemo(num("s-n"), num("s-p"), num("s-gamma"), 0.99, num("s-seed")));
  } catch (e) {
    fail(out, e);
    return;
  }
  const ms = performance.now() - t0;
  const share = (100 * r.candidates_checked) / r.total_pairs;
  out.textContent =
    `planted pair (${r.planted[0]}, ${r.planted[1]}) with strength ${fmt(r.planted_strength)}: ` +
    (r.found ? "found" : "missed") +
    `\nM = ${r.subsample_size}, L = ${r.repetitions}, γ₀ = ${fmt(r.gamma0)}, predicted exponent ${fmt(r.runtime_exponent, 3)}` +
    `\nchecked ${r.candidates_checked.toLocaleString()} of ${r.total_pairs.toLocaleString()} pairs (${share.toFixed(2)}%)` +
    (r.oracle_count === null ? "" : `, exhaustive search finds ${r.oracle_count} pair(s) at or above γ`) +
    `\n${ms.toFixed(0)} ms including data generation` +
    (r.oracle_count === null ? "" : " and the exhaustive check");
  const head = table.insertRow();
  for (const h of ["j", "k", "strength", "repetition"]) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  for (const h of r.hits.slice(0, 50)) {
    const row = table.insertRow();
    if (h.j === r.planted[0] && h.k === r.planted[1]) row.className = "planted";
    for (const v of [h.j, h.k, fmt(h.strength), h.repetition]) row.insertCell().textContent = v;
  }
}

function runCurves() {
  const out = $("c-out");
  let c;
  try {
    c = JSON.parse(discoveryCurves(num("c-p"), num("c-n")));
  } catch (e) {
    fail(out, e);
    return;
  }
  out.textContent = `M = ${c.subsample_size}, τ = ${fmt(c.tau, 2)}`;
  const cv = $("c-plot");
  const g = cv.getContext("2d");
  const pad = 40;
  const w = cv.width - 2 * pad;
  const h = cv.height - 2 * pad;
  g.clearRect(0, 0, cv.width, cv.height);
  g.strokeStyle = "#999";
  g.fillStyle = "#444";
  g.font = "12px system-ui";
  g.beginPath();
  g.moveTo(pad, pad);
  g.lineTo(pad, pad + h);
  g.lineTo(pad + w, pad + h);
  g.stroke();
  for (let i = 0; i <= 5; i++) {
    const x = pad + (w * i) / 5;
    g.fillText((0.5 + 0.1 * i).toFixed(1), x - 8, pad + h + 16);
    const y = pad + h - (h * i) / 5;
    g.fillText((0.2 * i).toFixed(1), 8, y + 4);
  }
  g.fillText("γ", pad + w / 2, cv.height - 4);
  const line = (ys, color) => {
    g.strokeStyle = color;
    g.lineWidth = 2;
    g.beginPath();
    c.gamma.forEach((gm, i) => {
      const x = pad + ((gm - 0.5) / 0.5) * w;
      const y = pad + h - ys[i] * h;
      if (i === 0) g.moveTo(x, y);
      else g.lineTo(x, y);
    });
    g.stroke();
    g.lineWidth = 1;
  };
  line(c.minimal, "#1565c0");
  line(c.gaussian, "#c62828");
}

function runPlan() {
  const out = $("p-out");
  try {
    const r = JSON.parse(plan(num("p-gamma"), num("p-m"), num("p-l"), num("p-p")));
    out.textContent =
      `discovery probability η = ${fmt(r.eta, 6)}` +
      `\nrepetitions for η ≥ 0.99: ${r.repetitions_for_99}` +
      `\nγ₀ = p^(−1/M) = ${fmt(r.gamma0)}` +
      `\nrun-time exponent ${r.runtime_exponent === null ? "n/a (γ ≤ γ₀)" : fmt(r.runtime_exponent, 3)}`;
  } catch (e) {
    fail(out, e);
  }
}

await init();
$("s-run").addEventListener("click", runSearch);
$("c-run").addEventListener("click", runCurves);
for (const id of ["p-gamma", "p-m", "p-l", "p-p"]) $(id).addEventListener("input", runPlan);
runCurves();
runPlan();
