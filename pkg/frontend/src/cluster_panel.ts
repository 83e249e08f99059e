/**
 * Detail panel for a selected cluster marker: member descriptors with their
 * document frequencies, the cluster's metrics, and per-member actions
 * (mark as intermediate, locate term).
 *
 * Every displayed number comes from a server payload.  The diagram document
 * itself carries density and centrality; cdr and SIR appear only when the
 * server supplied them (an optional `cdr` field on the cluster entry, and
 * the screening response for SIR values).  Document frequencies likewise
 * come from a server-provided mapping; missing values render as a
 * placeholder rather than being computed client-side.
 */

import { DiagramPayload, SuggestionRow } from "./schema";
import { clusterById } from "./view_model";

export const PLACEHOLDER = "—";
export const CDR_UNDEFINED = "undefined, centrality 0";

export interface ClusterPanelOptions {
  /** Per-descriptor document frequencies, when a server payload provides them. */
  frequencies?: Record<string, number>;
  /** Screening response for the current source cluster; source of SIR values. */
  suggestions?: SuggestionRow[];
  onMark?: (descriptor: string) => void;
  onLocate?: (descriptor: string) => void;
}

function metricRow(list: HTMLDListElement, name: string, valueClass: string, text: string): void {
  const dt = document.createElement("dt");
  dt.textContent = name;
  const dd = document.createElement("dd");
  dd.className = valueClass;
  dd.textContent = text;
  list.append(dt, dd);
}

function cdrText(centrality: number, cdr: number | undefined): string {
  if (centrality === 0) {
    return CDR_UNDEFINED;
  }
  return cdr !== undefined ? String(cdr) : PLACEHOLDER;
}

function sirText(clusterId: number, suggestions: SuggestionRow[] | undefined): string {
  const entry = suggestions?.find((s) => s.cluster_id === clusterId);
  if (!entry || entry.sir === null) {
    return PLACEHOLDER;
  }
  return String(entry.sir);
}

/** Render the panel for `clusterId` into `container`, replacing its contents. */
export function renderClusterPanel(
  container: HTMLElement,
  payload: DiagramPayload,
  clusterId: number | null,
  opts: ClusterPanelOptions = {},
): void {
  container.replaceChildren();
  const cluster = clusterId === null ? null : clusterById(payload, clusterId);
  if (cluster === null) {
    const empty = document.createElement("div");
    empty.className = "panel-empty";
    empty.textContent = "Select a cluster marker to inspect its members.";
    container.append(empty);
    return;
  }

  const panel = document.createElement("div");
  panel.className = "cluster-panel";
  panel.dataset.clusterId = String(cluster.cluster_id);

  const title = document.createElement("h3");
  title.className = "panel-title";
  title.textContent = `Cluster ${cluster.cluster_id}: ${cluster.label}`;
  panel.append(title);

  const metrics = document.createElement("dl");
  metrics.className = "cluster-metrics";
  metricRow(metrics, "density", "density-value", String(cluster.density));
  metricRow(metrics, "centrality", "centrality-value", String(cluster.centrality));
  metricRow(metrics, "cdr", "cdr-value", cdrText(cluster.centrality, cluster.cdr));
  metricRow(metrics, "SIR vs source", "sir-value", sirText(cluster.cluster_id, opts.suggestions));
  metricRow(metrics, "quadrant", "quadrant-value", cluster.quadrant);
  panel.append(metrics);

  const table = document.createElement("table");
  table.className = "member-table";
  const head = table.createTHead().insertRow();
  for (const column of ["Descriptor", "Documents", "Actions"]) {
    const th = document.createElement("th");
    th.textContent = column;
    head.append(th);
  }
  const body = table.createTBody();
  for (const descriptor of cluster.members) {
    const row = body.insertRow();
    row.className = "member-row";
    row.dataset.descriptor = descriptor;

    const nameCell = row.insertCell();
    nameCell.className = "member-descriptor";
    nameCell.textContent = descriptor;

    const freqCell = row.insertCell();
    freqCell.className = "member-frequency";
    const frequency = opts.frequencies?.[descriptor];
    freqCell.textContent = frequency !== undefined ? String(frequency) : PLACEHOLDER;

    const actionCell = row.insertCell();
    const markButton = document.createElement("button");
    markButton.className = "mark-button";
    markButton.type = "button";
    markButton.textContent = "mark as intermediate";
    markButton.addEventListener("click", () => opts.onMark?.(descriptor));
    const locateButton = document.createElement("button");
    locateButton.className = "locate-button";
    locateButton.type = "button";
    locateButton.textContent = "locate term";
    locateButton.addEventListener("click", () => opts.onLocate?.(descriptor));
    actionCell.append(markButton, locateButton);
  }
  panel.append(table);
  container.append(panel);
}
