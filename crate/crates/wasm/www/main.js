import init, { Demo } from "./pkg/segfuse_wasm.js";

const $ = (id) => document.getElementById(id);
let demo = null;

function paint(canvas, w, h, rgba) {
  canvas.width = w;
  canvas.height = h;
  const ctx = canvas.getContext("2d");
  ctx.putImageData(new ImageData(new Uint8ClampedArray(rgba), w, h), 0, 0);
}

function syncOutputs() {
  for (const input of document.querySelectorAll("input[type=range]")) {
    const out = input.parentElement.querySelector("output");
    if (out) out.textContent = input.value;
  }
}

function rebuildScene() {
  demo?.free();
  demo = new Demo(96, 64, +$("regions").value, +$("annotators").value, +$("jitter").value,
                  +$("merge").value, +$("skip").value, BigInt($("seed").value || 0));
  const members = $("members");
  const conf = $("confidences");
  members.innerHTML = "";
  conf.innerHTML = "";
  for (let i = 0; i < demo.annotators; i++) {
    const fig = document.createElement("figure");
    const canvas = document.createElement("canvas");
    fig.append(canvas, `annotator ${i + 1} (${demo.member_regions(i)} regions)`);
    members.append(fig);
    paint(canvas, demo.width, demo.height, demo.member_rgba(i));

    const label = document.createElement("label");
    label.innerHTML = `<span>confidence ${i + 1}</span><input type="range" min="0" max="1" step="0.05" value="1"><output>1</output>`;
    label.querySelector("input").addEventListener("input", (e) => {
      demo.set_confidence(i, +e.target.value);
      syncOutputs();
      refuse();
    });
    conf.append(label);
  }
  paint($("truth"), demo.width, demo.height, demo.truth_rgba());
  refuse();
}

function refuse() {
  try {
    $("error").textContent = "";
    const threshold = +$("threshold").value;
    paint($("confidence"), demo.width, demo.height, demo.confidence_rgba(threshold));
    const r = demo.fuse(threshold, $("init").value, +$("k").value || 0, 0n);
    paint($("consensus"), demo.width, demo.height, r.rgba());
    const f = (x) => x.toFixed(4);
    $("stats").innerHTML = `
      <tr><th>K requested</th><th>K used</th><th>regions</th><th>iterations</th><th>cost</th><th>masked px</th></tr>
      <tr><td>${r.k_requested}</td><td>${r.k_used}</td><td>${r.regions}</td><td>${r.iterations}</td><td>${r.cost}</td><td>${r.masked_pixels}</td></tr>
      <tr><th>GCE</th><th>VOI</th><th>PRI</th><th>BDE</th><th>COV</th><th>PRI / VOI vs scene</th></tr>
      <tr><td>${f(r.gce)}</td><td>${f(r.voi)}</td><td>${f(r.pri)}</td><td>${f(r.bde)}</td><td>${f(r.covering)}</td>
          <td>${f(r.truth_pri)} / ${f(r.truth_voi)}</td></tr>`;
    r.free();
  } catch (e) {
    $("error").textContent = String(e);
  }
}

await init();
syncOutputs();
for (const id of ["annotators", "regions", "jitter", "merge", "skip", "seed"]) {
  $(id).addEventListener("input", () => { syncOutputs(); rebuildScene(); });
}
for (const id of ["threshold", "init", "k"]) {
  $(id).addEventListener("input", () => { syncOutputs(); refuse(); });
}
rebuildScene();
