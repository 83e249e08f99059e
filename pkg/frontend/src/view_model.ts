/**
 * Pure view-model construction for the strategical diagram.
 *
 * One marker per cluster, x = density, y = centrality; median lines sit at
 * the payload's median values verbatim.  All numbers come straight from the
 * payload — nothing is recomputed here.
 */

import { ClusterEntry, DiagramPayload, Quadrant } from "./schema";

export interface Marker {
  clusterId: number;
  label: string;
  x: number;
  y: number;
  quadrant: Quadrant;
  flags: string[];
  members: string[];
  selected: boolean;
}

export interface DiagramViewModel {
  corpusRef: string;
  markers: Marker[];
  medians: { density: number; centrality: number };
  parameters: Record<string, unknown>;
}

export function buildViewModel(
  payload: DiagramPayload,
  selection: number | null = null,
): DiagramViewModel {
  return {
    corpusRef: payload.corpus_ref,
    markers: payload.clusters.map((cluster) => ({
      clusterId: cluster.cluster_id,
      label: cluster.label,
      x: cluster.density,
      y: cluster.centrality,
      quadrant: cluster.quadrant,
      flags: cluster.flags ?? [],
      members: [...cluster.members],
      selected: cluster.cluster_id === selection,
    })),
    medians: {
      density: payload.median_density,
      centrality: payload.median_centrality,
    },
    parameters: payload.parameters,
  };
}

/** First cluster whose member list contains the descriptor, else null. */
export function locateTerm(payload: DiagramPayload, descriptor: string): number | null {
  for (const cluster of payload.clusters) {
    if (cluster.members.includes(descriptor)) {
      return cluster.cluster_id;
    }
  }
  return null;
}

export function clusterById(
  payload: DiagramPayload,
  clusterId: number,
): ClusterEntry | null {
  return payload.clusters.find((c) => c.cluster_id === clusterId) ?? null;
}

/**
 * Screen-coordinate mapping for one axis.  Linear by default; in log mode
 * positive values are spread on a log10 scale and non-positive values are
 * pinned to the low end of the range (centrality can legitimately be 0).
 */
export interface Scale {
  (value: number): number;
}

export function makeScale(
  values: number[],
  rangeLow: number,
  rangeHigh: number,
  log = false,
): Scale {
  if (log) {
    const positives = values.filter((v) => v > 0);
    if (positives.length === 0) {
      return () => rangeLow;
    }
    const lo = Math.log10(Math.min(...positives));
    const hi = Math.log10(Math.max(...positives));
    const span = hi - lo;
    return (value: number) => {
      if (value <= 0) {
        return rangeLow;
      }
      if (span === 0) {
        return (rangeLow + rangeHigh) / 2;
      }
      return rangeLow + ((Math.log10(value) - lo) / span) * (rangeHigh - rangeLow);
    };
  }
  const lo = Math.min(...values, 0);
  const hi = Math.max(...values);
  const span = hi - lo;
  if (span === 0) {
    return () => (rangeLow + rangeHigh) / 2;
  }
  return (value: number) => rangeLow + ((value - lo) / span) * (rangeHigh - rangeLow);
}
