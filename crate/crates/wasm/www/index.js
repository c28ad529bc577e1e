import init, { Scene, kernel_weights } from "./pkg/dirdiff_wasm.js";

const SIDE = 128;
const $ = (id) => document.getElementById(id);
let scene;

function draw(canvas, rgba) {
  canvas.width = scene.width();
  canvas.height = scene.height();
  const ctx = canvas.getContext("2d");
  if (rgba.length === 0) {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    return;
  }
  ctx.putImageData(new ImageData(new Uint8ClampedArray(rgba), canvas.width, canvas.height), 0, 0);
}

function drawKernel() {
  const theta = Number($("theta").value);
  $("theta-value").textContent = theta.toFixed(1);
  const w = kernel_weights(theta);
  const max = Math.max(...w);
  const table = $("kernel");
  table.innerHTML = "";
  for (let r = 0; r < 3; r++) {
    const tr = table.insertRow();
    for (let c = 0; c < 3; c++) {
      const v = w[r * 3 + c];
      const cell = tr.insertCell();
      cell.textContent = v.toFixed(3);
      const shade = Math.round(255 - 200 * (v / max));
      cell.style.background = `rgb(${shade}, ${shade}, 255)`;
    }
  }
}

function applyMask() {
  const kind = $("mask-kind").value;
  if (kind === "text") {
    scene.set_text_mask($("mask-text").value || " ", 1);
  } else if (kind === "random") {
    scene.set_random_mask(Number($("mask-fraction").value), 42);
  } else {
    const h = Math.floor(scene.height() / 4);
    const w = Math.floor(scene.width() / 4);
    scene.set_block_mask(Math.floor((scene.height() - h) / 2), Math.floor((scene.width() - w) / 2), h, w);
  }
  refresh();
}

function refresh() {
  draw($("damaged"), scene.damaged_rgba());
  draw($("regular"), scene.regular_rgba());
  draw($("directional"), scene.directional_rgba());
  draw($("overlay"), scene.overlay_rgba());
  $("regular-caption").textContent = "regular diffusion";
  $("directional-caption").textContent = "directional";
}

function run() {
  const t0 = performance.now();
  const itRegular = scene.run_regular(1e-3);
  const t1 = performance.now();
  const itDirectional = scene.run_directional(Number($("patch").value), 1e-3);
  const t2 = performance.now();
  draw($("regular"), scene.regular_rgba());
  draw($("directional"), scene.directional_rgba());
  draw($("overlay"), scene.overlay_rgba());
  $("regular-caption").textContent =
    `regular: mse ${scene.regular_mse().toExponential(3)}, ${itRegular} it, ${(t1 - t0).toFixed(0)} ms`;
  $("directional-caption").textContent =
    `directional: mse ${scene.directional_mse().toExponential(3)}, ${itDirectional} it, ${(t2 - t1).toFixed(0)} ms`;
}

function loadPattern() {
  scene = new Scene($("pattern").value, SIDE);
  applyMask();
}

function loadUpload(file) {
  const img = new Image();
  img.onload = () => {
    const scale = Math.min(1, 256 / Math.max(img.width, img.height));
    const w = Math.max(8, Math.round(img.width * scale));
    const h = Math.max(8, Math.round(img.height * scale));
    const canvas = document.createElement("canvas");
    canvas.width = w;
    canvas.height = h;
    const ctx = canvas.getContext("2d");
    ctx.drawImage(img, 0, 0, w, h);
    const next = Scene.from_rgba(w, h, new Uint8Array(ctx.getImageData(0, 0, w, h).data.buffer));
    if (next) {
      scene = next;
      applyMask();
    }
    URL.revokeObjectURL(img.src);
  };
  img.src = URL.createObjectURL(file);
}

function enablePainting() {
  const canvas = $("damaged");
  let down = false;
  const paint = (ev) => {
    const rect = canvas.getBoundingClientRect();
    const col = ((ev.clientX - rect.left) / rect.width) * scene.width();
    const row = ((ev.clientY - rect.top) / rect.height) * scene.height();
    scene.paint(row, col, Math.max(1.5, scene.width() / 40), ev.shiftKey);
    refresh();
  };
  canvas.addEventListener("pointerdown", (ev) => { down = true; paint(ev); });
  canvas.addEventListener("pointermove", (ev) => { if (down) paint(ev); });
  window.addEventListener("pointerup", () => { down = false; });
}

await init();
$("theta").addEventListener("input", drawKernel);
$("pattern").addEventListener("change", loadPattern);
$("upload").addEventListener("change", (ev) => ev.target.files[0] && loadUpload(ev.target.files[0]));
for (const id of ["mask-kind", "mask-text", "mask-fraction"]) $(id).addEventListener("change", applyMask);
$("run").addEventListener("click", run);
enablePainting();
drawKernel();
loadPattern();
