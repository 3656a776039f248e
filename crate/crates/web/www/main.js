import init, { constructFamily, exactSearch, checkFamily } from "./pkg/gridposet_web.js";

const $ = (id) => document.getElementById(id);
const canvas = $("board");
const ctx = canvas.getContext("2d");
const out = $("out");

let dims = [4, 4];
let points = new Set();
let highlight = new Set();

const key = (x, y) => `${x},${y}`;

function parseGrid() {
  const d = $("grid").value.split("x").map(Number);
  if (d.length !== 2 || d.some((v) => !Number.isInteger(v) || v < 1)) {
    throw new Error("the page draws two-dimensional grids like 4x4");
  }
  return d;
}

function familyJson() {
  const pts = [...points].map((p) => p.split(",").map(Number));
  pts.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  return JSON.stringify({ dims, points: pts });
}

function load(family) {
  dims = family.dims;
  $("grid").value = dims.join("x");
  points = new Set(family.points.map(([x, y]) => key(x, y)));
  highlight = new Set();
  draw();
}

function draw() {
  const [k, l] = dims;
  const cell = Math.floor(Math.min(canvas.width / k, canvas.height / l));
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (let x = 1; x <= k; x++) {
    for (let y = 1; y <= l; y++) {
      const px = (x - 1) * cell;
      const py = canvas.height - y * cell;
      ctx.strokeStyle = "#ccc";
      ctx.strokeRect(px, py, cell, cell);
      if (points.has(key(x, y))) {
        ctx.fillStyle = highlight.has(key(x, y)) ? "#d33" : "#246";
        ctx.beginPath();
        ctx.arc(px + cell / 2, py + cell / 2, cell * 0.32, 0, 2 * Math.PI);
        ctx.fill();
      }
    }
  }
}

function show(run) {
  try {
    const text = run();
    out.textContent = JSON.stringify(JSON.parse(text), null, 1);
    return JSON.parse(text);
  } catch (e) {
    out.textContent = `error: ${e.message ?? e}`;
    return null;
  }
}

canvas.addEventListener("click", (ev) => {
  const [k, l] = dims;
  const cell = Math.floor(Math.min(canvas.width / k, canvas.height / l));
  const r = canvas.getBoundingClientRect();
  const x = Math.floor((ev.clientX - r.left) / cell) + 1;
  const y = Math.floor((canvas.height - (ev.clientY - r.top)) / cell) + 1;
  if (x < 1 || x > k || y < 1 || y > l) return;
  const p = key(x, y);
  points.has(p) ? points.delete(p) : points.add(p);
  highlight = new Set();
  draw();
});

$("reset").onclick = () => {
  show(() => {
    dims = parseGrid();
    points = new Set();
    highlight = new Set();
    draw();
    return familyJson();
  });
};

$("construct").onclick = () => {
  const v = show(() => constructFamily($("kind").value, +$("k").value, +$("l").value, +$("s").value));
  if (v) load(v);
};

for (const op of ["la", "sat"]) {
  $(op).onclick = () => {
    const v = show(() => exactSearch(op, $("grid").value, $("posets").value, $("mode").value));
    if (v && v.witness && v.witness.dims.length === 2) load(v.witness);
  };
}

$("check").onclick = () => {
  const v = show(() => checkFamily(familyJson(), $("posets").value, $("mode").value));
  if (!v) return;
  highlight = new Set();
  for (const c of v.copies) {
    if (c) for (const [x, y] of c.points) highlight.add(key(x, y));
  }
  draw();
};

await init();
out.textContent = "ready";
draw();
