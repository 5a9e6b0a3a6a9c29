import init, { describe, kernelFigure, coverageTrial } from "./pkg/cantordiff_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function report(err) {
  $("status").textContent = err ? String(err) : "";
  $("status").className = err ? "error" : "";
}

function classify() {
  try {
    const info = JSON.parse(describe(num("a"), num("b")));
    $("info").textContent = JSON.stringify(info, null, 2);
    $("kernel").innerHTML = kernelFigure(num("a"), num("b"), num("eps"));
    report();
  } catch (e) {
    report(e);
  }
}

function runTrial() {
  try {
    const r = JSON.parse(coverageTrial(num("a"), num("b"), num("depth"), num("n"), num("seed"), num("trial")));
    $("squares").innerHTML = r.svg;
    const rows = r.covers.map((c, i) => `depth ${i + 1}: ${c ? "covers I" : "misses I"}, ${r.hits[i]} squares hit`);
    $("coverage").textContent = `I = [${r.target.lo.toExponential(3)}, ${r.target.hi.toExponential(3)}]\n` + rows.join("\n");
    report();
  } catch (e) {
    report(e);
  }
}

await init();
$("describe").addEventListener("click", classify);
$("trial-run").addEventListener("click", runTrial);
classify();
runTrial();
