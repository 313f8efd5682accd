import init, { measure_field, strip_layers, cube_spectrum } from "./pkg/lattice_harmonic_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function report(e) {
  $("status").textContent = e ? String(e) : "";
}

// 0 → dark blue, 1 → yellow
function color(t) {
  t = Math.max(0, Math.min(1, t));
  const r = Math.round(255 * Math.sqrt(t));
  const g = Math.round(255 * t);
  const b = Math.round(160 * (1 - t));
  return `rgb(${r},${g},${b})`;
}

function drawGrid(canvas, values, rows, cols, lo, hi) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width / cols;
  const h = canvas.height / rows;
  for (let i = 0; i < rows; i++) {
    for (let j = 0; j < cols; j++) {
      ctx.fillStyle = color((values[i * cols + j] - lo) / (hi - lo || 1));
      ctx.fillRect(j * w, i * h, Math.ceil(w), Math.ceil(h));
    }
  }
}

function runMeasure() {
  const d = num("m-den");
  const steps = num("m-steps");
  try {
    const g = measure_field(d, steps);
    const cols = d + 1;
    drawGrid($("m-canvas"), g, 2 * steps + 1, cols, 0, 1);
    const mid = g.slice(steps * cols, (steps + 1) * cols);
    const a1 = d * Math.acosh(2 - Math.cos(Math.PI / d));
    $("m-info").textContent =
      `max g(x, 0)        = ${Math.max(...mid).toExponential(6)}\n` +
      `a1                 = ${a1.toFixed(6)}\n` +
      `max g(x,0)·e^(a1N) = ${(Math.max(...mid) * Math.exp(a1 * steps / d)).toFixed(6)}`;
    report();
  } catch (e) {
    report(e);
  }
}

function parseList(id) {
  return Float64Array.from($(id).value.split(",").map((s) => Number(s.trim())));
}

function runStrip() {
  const layers = num("s-layers");
  const win = num("s-window");
  try {
    const v = strip_layers(layers, parseList("s-bottom"), parseList("s-top"), win);
    const cols = 2 * win + 1;
    let lo = Infinity, hi = -Infinity;
    for (const x of v) { lo = Math.min(lo, x); hi = Math.max(hi, x); }
    drawGrid($("s-canvas"), v, layers + 1, cols, lo, hi);
    report();
  } catch (e) {
    report(e);
  }
}

function runSpectrum() {
  const d = num("e-den");
  const r = num("e-side");
  const n = Number($("e-dim").value);
  try {
    const v = cube_spectrum(d, r, n);
    const k = v.length / 2;
    const canvas = $("e-canvas");
    const ctx = canvas.getContext("2d");
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const top = v[v.length - 1] * 1.05;
    let worst = 0;
    for (let i = 0; i < k; i++) {
      const x = ((i + 0.5) / k) * canvas.width;
      const yn = canvas.height * (1 - v[2 * i] / top);
      const yc = canvas.height * (1 - v[2 * i + 1] / top);
      ctx.fillStyle = "#1565c0";
      ctx.fillRect(x - 2, yn - 2, 4, 4);
      ctx.strokeStyle = "#e65100";
      ctx.strokeRect(x - 3, yc - 3, 6, 6);
      worst = Math.max(worst, Math.abs(v[2 * i] - v[2 * i + 1]) / v[2 * i + 1]);
    }
    $("e-info").textContent =
      `eigenvalues        = ${k}\n` +
      `lambda_1           = ${v[0].toFixed(6)}\n` +
      `max relative diff  = ${worst.toExponential(2)}\n` +
      `filled: numeric, open: closed form`;
    report();
  } catch (e) {
    report(e);
  }
}

await init();
$("m-run").onclick = runMeasure;
$("s-run").onclick = runStrip;
$("e-run").onclick = runSpectrum;
runMeasure();
runStrip();
runSpectrum();
