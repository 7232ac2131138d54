import init, { check_coverage, sheafify, verify_axioms } from "./pkg/ltsheaf_web.js";

const EXAMPLE = `# The poset 0 <= 1 with the double-negation coverage.
poset { u: 0 <= 1 }
coverage dense

# Two elements at 1 that both restrict to the one element at 0.
presheaf K { 0: 1, 1: 2, u: [0, 0] }

family all
universe auto(1)
`;

const spec = document.getElementById("spec");
const out = document.getElementById("out");
spec.value = EXAMPLE;

function show(json) {
  const v = JSON.parse(json);
  out.textContent = JSON.stringify(v, null, 2);
  out.className = v.passed === true ? "" : "fail";
}

await init();
document.getElementById("check").onclick = () => show(check_coverage(spec.value));
document.getElementById("sheafify").onclick = () =>
  show(sheafify(spec.value, document.getElementById("presheaf").value.trim()));
document.getElementById("axioms").onclick = () => show(verify_axioms(spec.value));
