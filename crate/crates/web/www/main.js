import init, { enclosure_disks, delta_eigenvalues, gaussian_resonance_geometry } from "./pkg/diracspec_web.js";

const num = (id) => parseFloat(document.getElementById(id).value);

// World window [-3, 3] × [-1.5, 1.5] mapped onto the canvas.
function plane(id) {
  const c = document.getElementById(id);
  const g = c.getContext("2d");
  const sx = c.width / 6, sy = c.height / 3;
  const px = (x, y) => [c.width / 2 + x * sx, c.height / 2 - y * sy];
  g.clearRect(0, 0, c.width, c.height);
  g.strokeStyle = "#bbb";
  g.beginPath();
  g.moveTo(0, c.height / 2); g.lineTo(c.width, c.height / 2);
  g.moveTo(c.width / 2, 0); g.lineTo(c.width / 2, c.height);
  g.stroke();
  return { g, px, sx };
}

function essential(p, m, color = "#333") {
  p.g.strokeStyle = color;
  p.g.lineWidth = 3;
  for (const s of [1, -1]) {
    p.g.beginPath();
    p.g.moveTo(...p.px(s * m, 0));
    p.g.lineTo(...p.px(s * 3, 0));
    p.g.stroke();
  }
  p.g.lineWidth = 1;
}

function circle(p, cx, r, color) {
  p.g.strokeStyle = color;
  p.g.beginPath();
  p.g.arc(...p.px(cx, 0), r * p.sx, 0, 2 * Math.PI);
  p.g.stroke();
}

function dot(p, x, y, color) {
  p.g.fillStyle = color;
  p.g.beginPath();
  p.g.arc(...p.px(x, y), 4, 0, 2 * Math.PI);
  p.g.fill();
}

function guard(out, f) {
  try { f(); } catch (e) { document.getElementById(out).textContent = String(e); }
}

function drawDisks() {
  guard("disks-out", () => {
    const m = num("m1");
    const p = plane("disks");
    essential(p, m);
    const [x0, r0] = enclosure_disks(num("v1"), m);
    circle(p, x0 * m, r0 * m, "#c33");
    circle(p, -x0 * m, r0 * m, "#c33");
    document.getElementById("disks-out").textContent =
      `centres ±${(x0 * m).toFixed(10)}, radius ${(r0 * m).toFixed(10)}`;
  });
}

function drawDelta() {
  guard("delta-out", () => {
    const m = num("m2");
    const p = plane("delta");
    essential(p, m);
    const ev = delta_eigenvalues(num("kappa"), num("tau"), m);
    const lines = [];
    for (let j = 0; j < ev.length; j += 2) {
      dot(p, ev[j], ev[j + 1], "#36c");
      lines.push(`${ev[j].toFixed(10)} ${ev[j + 1] >= 0 ? "+" : "-"} ${Math.abs(ev[j + 1]).toFixed(10)}i`);
    }
    document.getElementById("delta-out").textContent = lines.length ? lines.join("\n") : "no eigenvalues";
  });
}

function drawResonances() {
  guard("res-out", () => {
    const m = num("m3"), phi = num("phi");
    const p = plane("res");
    // Rotated essential spectrum ±√(e^{−2iφ}t² + m²).
    p.g.strokeStyle = "#333";
    for (const s of [1, -1]) {
      p.g.beginPath();
      for (let j = 0; j <= 200; j++) {
        const t = 0.02 * j;
        const re = Math.cos(2 * phi) * t * t + m * m, im = -Math.sin(2 * phi) * t * t;
        const mod = Math.hypot(re, im), arg = Math.atan2(im, re) / 2;
        const [x, y] = p.px(s * Math.sqrt(mod) * Math.cos(arg), s * Math.sqrt(mod) * Math.sin(arg));
        j ? p.g.lineTo(x, y) : p.g.moveTo(x, y);
      }
      p.g.stroke();
    }
    const g = gaussian_resonance_geometry(num("ga"), num("gb"), m, phi);
    const [x0, r0, phi0, n] = g;
    if (Number.isFinite(x0)) {
      circle(p, x0 * m, r0 * m, "#c33");
      circle(p, -x0 * m, r0 * m, "#c33");
    }
    for (let j = 0; j < n; j++) {
      const re = g[4 + 3 * j + 1], im = g[4 + 3 * j + 2];
      dot(p, re, im, "#393");
      dot(p, -re, im, "#393");
    }
    document.getElementById("res-out").textContent =
      (Number.isFinite(x0) ? `disks ±${(x0 * m).toFixed(6)}, radius ${(r0 * m).toFixed(6)}` : "v_θ ≥ 1: no disks") +
      `\nφ₀ (massless) = ${phi0.toFixed(8)}\n${n} curve points`;
  });
}

await init();
for (const [ids, draw] of [
  [["v1", "m1"], drawDisks],
  [["kappa", "tau", "m2"], drawDelta],
  [["ga", "gb", "m3", "phi"], drawResonances],
]) {
  for (const id of ids) document.getElementById(id).addEventListener("input", draw);
  draw();
}
