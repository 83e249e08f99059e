/**
 * Canned server payloads for the UI tests, shaped exactly like the HTTP
 * API's responses.  Values are modeled on the bundled corpora so the mocks
 * stay honest about magnitudes and field types.
 */

import { DiagramPayload, SessionView, TargetRow } from "../src/schema";

export const PARAMETERS = {
  threshold: 0.05,
  min_doc_freq: 2,
  stoplist: [] as string[],
  min_cluster_size: 3,
  max_cluster_size: 10,
  attachment: "strongest-link",
  band: [0.5, 2.0] as [number, number],
};

/** Three-cluster source diagram; the source term sits in cluster 1. */
export function sourceDiagram(): DiagramPayload {
  return {
    schema: "strategical-diagram",
    schema_version: 1,
    corpus_ref: "c-raynaud",
    median_density: 0.4375,
    median_centrality: 0.0625,
    parameters: { ...PARAMETERS },
    clusters: [
      {
        cluster_id: 1,
        label: "Raynaud Disease",
        members: ["Raynaud Disease", "Vasoconstriction", "Fingers", "Cold Temperature"],
        density: 0.5,
        centrality: 0.25,
        seed_e: 0.75,
        quadrant: "both-above",
      },
      {
        cluster_id: 2,
        label: "Blood Viscosity",
        members: ["Blood Viscosity", "Erythrocyte Aggregation", "Erythrocyte Deformability"],
        density: 0.4375,
        centrality: 0.0625,
        seed_e: 0.5,
        quadrant: "both-above",
      },
      {
        cluster_id: 3,
        label: "Nifedipine",
        members: ["Nifedipine", "Calcium Channel Blockers", "Vasodilator Agents"],
        density: 0.35,
        centrality: 0,
        seed_e: 0.4375,
        quadrant: "both-below",
      },
    ],
  };
}

/** Target rows as the targets action returns them. */
export function targetRows(): TargetRow[] {
  const nearOne = {
    cluster_a: 3,
    cluster_b: 1,
    cdr_a: 0.1875,
    cdr_b: 0.1386748844375963,
    ratio: 0.7395993836671803,
    kind: "STR" as const,
  };
  const fishTrio = ["Dietary Fats", "Fatty Acids Omega-3", "Fish Oils"].map(
    (descriptor): TargetRow => ({
      descriptor,
      intermediate: "Blood Viscosity",
      cluster_id: 3,
      report: { ...nearOne },
      flags: ["STR_NEAR_ONE"],
      disjoint: true,
      evidence: [],
      title_warnings: [],
    }),
  );
  const plateletTrio: TargetRow[] = [
    {
      descriptor: "Blood Platelets",
      intermediate: "Blood Viscosity",
      cluster_id: 2,
      report: null,
      flags: ["NO_CDR"],
      disjoint: false,
      evidence: ["3710024", "3710025"],
      title_warnings: [],
    },
    {
      descriptor: "Epoprostenol",
      intermediate: "Blood Viscosity",
      cluster_id: 2,
      report: null,
      flags: ["NO_CDR"],
      disjoint: true,
      evidence: [],
      title_warnings: [],
    },
    {
      descriptor: "Platelet Aggregation",
      intermediate: "Blood Viscosity",
      cluster_id: 2,
      report: null,
      flags: ["NO_CDR"],
      disjoint: true,
      evidence: [],
      title_warnings: [],
    },
  ];
  return [...fishTrio, ...plateletTrio];
}

export function sessionView(overrides: Partial<SessionView> = {}): SessionView {
  return {
    schema: "discovery-session",
    schema_version: 1,
    session_id: "sess-1",
    config: { ...PARAMETERS },
    source: {
      corpus_id: "c-raynaud",
      descriptor: "Raynaud Disease",
      vocabulary: sourceDiagram()
        .clusters.flatMap((c) => c.members)
        .sort(),
      diagram: sourceDiagram(),
    },
    intermediates: [],
    target_candidates: [],
    audit_log: [
      {
        seq: 1,
        timestamp: "2026-08-25T12:00:00+00:00",
        action: "create",
        detail: { descriptor: "Raynaud Disease" },
      },
    ],
    ...overrides,
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
