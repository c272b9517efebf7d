import init, { solve1d, scatter2d, eigenSpectrum } from "./pkg/oft_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

// Let the status text paint before a blocking solve.
function busy(statusId, work) {
  $(statusId).textContent = "running...";
  setTimeout(() => {
    try {
      work();
    } catch (e) {
      $(statusId).textContent = `error: ${e.message ?? e}`;
    }
  }, 20);
}

function axes(ctx, w, h) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(0, h / 2);
  ctx.lineTo(w, h / 2);
  ctx.stroke();
}

function line(ctx, xs, ys, x0, x1, ymax, color) {
  const { width: w, height: h } = ctx.canvas;
  ctx.strokeStyle = color;
  ctx.beginPath();
  xs.forEach((x, i) => {
    const px = ((x - x0) / (x1 - x0)) * w;
    const py = h / 2 - (ys[i] / ymax) * (h / 2 - 10);
    i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
  });
  ctx.stroke();
}

function runSolve() {
  const s = solve1d(num("s-kappa"), num("s-nx"), num("s-dt0"), num("s-t"));
  const ctx = $("s-plot").getContext("2d");
  const { x, approx, exact } = s;
  const ymax = Math.max(...exact.map(Math.abs), ...approx.map(Math.abs)) || 1;
  axes(ctx, ctx.canvas.width, ctx.canvas.height);
  line(ctx, x, exact, -1, 1, ymax, "#333");
  line(ctx, x, approx, -1, 1, ymax, "#c33");
  $("s-status").textContent =
    `steps ${s.steps}   relErr ${s.relErr.toExponential(3)}   residual ${s.residual.toExponential(3)}`;
  s.free();
}

function color(t) {
  const c = Math.round(255 * Math.min(1, Math.max(0, t)));
  return [c, Math.round(c * 0.6), 255 - c];
}

function runScatter() {
  const n = num("h-n");
  const s = scatter2d(n, num("h-kappa"), num("h-amp"), num("h-width"), 0.02);
  const { re, im } = s;
  const abs = $("h-show").value === "abs";
  const vals = re.map((r, i) => (abs ? Math.hypot(r, im[i]) : r));
  const vmax = Math.max(...vals.map(Math.abs)) || 1;
  const ctx = $("h-plot").getContext("2d");
  const img = ctx.createImageData(n, n);
  for (let j = 0; j < n; j++) {
    for (let i = 0; i < n; i++) {
      const v = vals[i + n * j];
      const t = abs ? v / vmax : 0.5 + v / (2 * vmax);
      const [r, g, b] = color(t);
      const k = 4 * (i + n * (n - 1 - j));
      img.data.set([r, g, b, 255], k);
    }
  }
  const tmp = new OffscreenCanvas(n, n);
  tmp.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(tmp, 0, 0, ctx.canvas.width, ctx.canvas.height);
  $("h-status").textContent =
    `max ${vmax.toExponential(3)}   residual ${s.residual.toExponential(3)}   ${s.wallTime.toFixed(2)} s`;
  s.free();
}

function runEigen() {
  const data = eigenSpectrum(num("e-alpha"), num("e-length"), num("e-count"));
  const roots = [];
  for (let k = 0; k < data.length; k += 3) roots.push(data.slice(k, k + 3));
  const ctx = $("e-plot").getContext("2d");
  const { width: w, height: h } = ctx.canvas;
  ctx.clearRect(0, 0, w, h);
  const reMax = Math.max(...roots.map((r) => r[0])) * 1.05;
  const imMin = Math.min(...roots.map((r) => r[1])) * 1.2;
  ctx.fillStyle = "#36c";
  for (const [re, im] of roots) {
    const px = (re / reMax) * (w - 20) + 10;
    const py = (im / imMin) * (h - 20) + 10;
    ctx.beginPath();
    ctx.arc(px, py, 3, 0, 2 * Math.PI);
    ctx.fill();
  }
  const worst = Math.max(...roots.map((r) => r[2]));
  const first = roots[0];
  $("e-status").textContent =
    `${roots.length} roots, Re from left, Im downward   λ₁ = ${first[0].toFixed(6)} ${first[1].toFixed(6)}i   max |f| ${worst.toExponential(2)}`;
}

await init();
$("s-run").onclick = () => busy("s-status", runSolve);
$("h-run").onclick = () => busy("h-status", runScatter);
$("e-run").onclick = () => busy("e-status", runEigen);
$("h-show").onchange = () => busy("h-status", runScatter);
busy("e-status", runEigen);
