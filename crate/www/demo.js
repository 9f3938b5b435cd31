import init, { tokens_json, similarity_json, links_json } from "./pkg/triallink_wasm.js";

const $ = (id) => document.getElementById(id);

const DEFAULT_BASE = [
  "acquired immunodeficiency syndrome", "adenocarcinoma of the colon",
  "alzheimer's disease", "asthma", "beta-thalassemia", "blood disorders",
  "breast cancer", "chronic kidney disease", "colon adenocarcinoma",
  "coronary artery disease", "crohn disease", "diabetes mellitus",
  "graves disease", "hiv infections", "huntington disease", "hypertension",
  "lung cancer", "lyme disease", "parkinson disease", "thalassemia",
  "type 2 diabetes mellitus", "wilson disease",
].join("\n");

function tokenChips(el, tokens, shared) {
  el.innerHTML = "";
  const sharedSet = new Set(shared || []);
  for (const t of tokens) {
    const span = document.createElement("span");
    span.textContent = t;
    if (sharedSet.has(t)) span.className = "shared";
    el.appendChild(span);
  }
}

function refreshTokens() {
  const err = $("tok-err");
  err.textContent = "";
  try {
    const q = parseInt($("tok-q").value, 10);
    const report = JSON.parse(tokens_json($("tok-text").value, q));
    tokenChips($("tok-out"), report.tokens);
  } catch (e) {
    err.textContent = String(e);
    $("tok-out").innerHTML = "";
  }
}

function refreshSimilarity() {
  const err = $("sim-err");
  err.textContent = "";
  try {
    const report = JSON.parse(
      similarity_json($("sim-a").value, $("sim-b").value, $("sim-base").value, 2)
    );
    $("sim-score").textContent = report.score.toFixed(4);
    $("sim-plain").textContent = report.plain_jaccard.toFixed(4);
    tokenChips($("sim-shared"), [...report.tokens_a, ...report.tokens_b.filter(
      (t) => !report.tokens_a.includes(t))], report.shared);
    const tbody = $("sim-weights").querySelector("tbody");
    tbody.innerHTML = "";
    for (const row of report.weights) {
      const tr = document.createElement("tr");
      tr.innerHTML =
        `<td><code>${row.token.replace(/</g, "&lt;")}</code></td>` +
        `<td class="num">${row.count}</td>` +
        `<td class="num">${row.weight.toFixed(4)}</td>` +
        `<td>${row.shared ? "yes" : ""}</td>`;
      tbody.appendChild(tr);
    }
  } catch (e) {
    err.textContent = String(e);
  }
}

function diffCell(v) {
  if (v === null || v === undefined) return "";
  return (v >= 0 ? "+" : "") + v.toFixed(1) + "%";
}

function refreshLinks() {
  const err = $("link-err");
  err.textContent = "";
  const theta = parseFloat($("link-theta").value);
  $("link-theta-out").textContent = theta.toFixed(2);
  try {
    const report = JSON.parse(
      links_json($("link-src").value, $("link-tgt").value, theta, 2, $("link-th").value)
    );
    const links = $("link-links").querySelector("tbody");
    links.innerHTML = "";
    for (const l of report.links) {
      const tr = document.createElement("tr");
      const methods = l.methods
        .map((m) => `<span class="pill ${m}">${m}</span>`)
        .join("");
      tr.innerHTML =
        `<td>${escapeHtml(l.source)}</td><td>${escapeHtml(l.target)}</td>` +
        `<td class="num">${l.score.toFixed(4)}</td><td>${methods}</td>`;
      links.appendChild(tr);
    }
    const stats = $("link-stats").querySelector("tbody");
    stats.innerHTML = "";
    for (const r of report.stats) {
      const tr = document.createElement("tr");
      tr.innerHTML =
        `<td>${r.method}</td><td class="num">${r.link_count}</td>` +
        `<td class="num">${diffCell(r.link_diff_pct)}</td>` +
        `<td class="num">${r.linked_entity_count}</td>` +
        `<td class="num">${diffCell(r.entity_diff_pct)}</td>`;
      stats.appendChild(tr);
    }
  } catch (e) {
    err.textContent = String(e);
  }
}

function escapeHtml(s) {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

async function main() {
  await init();
  $("sim-base").value = DEFAULT_BASE;
  $("loading").hidden = true;
  $("app").hidden = false;

  for (const id of ["tok-text", "tok-q"]) $(id).addEventListener("input", refreshTokens);
  for (const id of ["sim-a", "sim-b", "sim-base"]) $(id).addEventListener("input", refreshSimilarity);
  for (const id of ["link-src", "link-tgt", "link-th", "link-theta"])
    $(id).addEventListener("input", refreshLinks);

  refreshTokens();
  refreshSimilarity();
  refreshLinks();
}

main();
