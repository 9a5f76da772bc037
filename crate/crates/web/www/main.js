import init, { maximal_profile, square_functions, rubio } from "./pkg/ballspace_web.js";

const COLORS = ["#888", "#c33", "#36c", "#393"];

function plot(section, x, series) {
  const canvas = section.querySelector("canvas");
  const dpr = window.devicePixelRatio || 1;
  canvas.width = canvas.clientWidth * dpr;
  canvas.height = canvas.clientHeight * dpr;
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 10 * dpr;
  let lo = 0, hi = 0;
  for (const s of series) for (const v of s.y) { if (v < lo) lo = v; if (v > hi) hi = v; }
  if (hi === lo) hi = lo + 1;
  const px = (t) => pad + (t - x[0]) / (x[x.length - 1] - x[0]) * (w - 2 * pad);
  const py = (v) => h - pad - (v - lo) / (hi - lo) * (h - 2 * pad);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#ddd";
  ctx.beginPath(); ctx.moveTo(pad, py(0)); ctx.lineTo(w - pad, py(0)); ctx.stroke();
  series.forEach((s, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.lineWidth = 1.5 * dpr;
    ctx.beginPath();
    s.y.forEach((v, j) => (j ? ctx.lineTo(px(x[j]), py(v)) : ctx.moveTo(px(x[j]), py(v))));
    ctx.stroke();
  });
  section.querySelector(".key").innerHTML = series
    .map((s, i) => `<span style="color:${COLORS[i % COLORS.length]}">&#9644; ${s.name}</span>`)
    .join("");
}

function fmt(v) {
  return Number.isInteger(v) ? String(v) : v.toPrecision(6);
}

function wire(id, compute) {
  const section = document.getElementById(id);
  const stats = section.querySelector(".stats");
  const val = (name) => section.querySelector(`[name=${name}]`);
  const run = () => {
    try {
      const out = compute(val);
      plot(section, out.x, out.series);
      stats.classList.remove("err");
      stats.textContent = Object.entries(out.stats).map(([k, v]) => `${k.padEnd(14)} ${fmt(v)}`).join("\n");
    } catch (e) {
      stats.classList.add("err");
      stats.textContent = String(e.message || e);
    }
  };
  section.querySelectorAll("input, select").forEach((el) => el.addEventListener("change", run));
  run();
}

await init();

wire("maximal", (val) => {
  const r = JSON.parse(maximal_profile(val("expr").value, +val("level").value, val("radius").checked));
  return {
    x: r.x,
    series: [{ name: "|f|", y: r.f.map(Math.abs) }, { name: "Mf", y: r.mf }],
    stats: { "max Mf/|f|": r.sup_ratio },
  };
});

wire("square", (val) => {
  const r = JSON.parse(square_functions(val("expr").value, +val("level").value, val("family").value));
  return {
    x: r.x,
    series: [{ name: "f", y: r.f }, { name: "V f", y: r.v }, { name: "W f", y: r.w }],
    stats: { "|f|_2": r.norm_f, "|(V²+W²)^½|_2": r.norm_quadratic },
  };
});

wire("rubio", (val) => {
  const r = JSON.parse(rubio(val("expr").value, +val("level").value, +val("p").value, +val("alpha").value));
  return {
    x: r.x,
    series: [{ name: "|k|", y: r.k }, { name: "R k", y: r.r }, { name: "M R k / (α|M|)", y: r.mr.map((v) => v / (r.alpha * r.norm_m)) }],
    stats: { "|M|_Lp": r.norm_m, terms: r.terms, "|k|_p": r.norm_k, "|Rk|_p": r.norm_r, "α/(α-1)|k|_p": r.alpha / (r.alpha - 1) * r.norm_k },
  };
});
