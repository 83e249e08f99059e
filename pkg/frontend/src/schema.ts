/**
 * Wire types for the meshlink HTTP API, plus payload validation.
 *
 * The UI renders numbers exactly as the server sent them and never derives
 * E, density, centrality, cdr, SIR, or STR on its own.  Unknown fields in
 * server payloads are tolerated; a handful of optional fields (`flags`,
 * `cdr` on cluster entries) are picked up when a payload carries them.
 */

export const DIAGRAM_SCHEMA = "strategical-diagram";
export const SESSION_SCHEMA = "discovery-session";
export const SUPPORTED_SCHEMA_VERSION = 1;

export const FLAG_BELOW_MEDIANS = "BELOW_MEDIANS";
export const FLAG_SIR_NEAR_ONE = "SIR_NEAR_ONE";
export const FLAG_STR_NEAR_ONE = "STR_NEAR_ONE";
export const FLAG_NO_CDR = "NO_CDR";

export type Quadrant =
  | "both-above"
  | "density-only"
  | "centrality-only"
  | "both-below";

export interface ClusterEntry {
  cluster_id: number;
  label: string;
  members: string[];
  density: number;
  centrality: number;
  seed_e: number;
  quadrant: Quadrant;
  /** Optional enrichments; absent from minimal diagram payloads. */
  flags?: string[];
  cdr?: number;
}

export interface DiagramPayload {
  schema: typeof DIAGRAM_SCHEMA;
  schema_version: number;
  corpus_ref: string;
  median_density: number;
  median_centrality: number;
  parameters: Record<string, unknown>;
  clusters: ClusterEntry[];
}

export interface RatioReportData {
  cluster_a: number;
  cluster_b: number;
  cdr_a: number;
  cdr_b: number;
  ratio: number;
  kind: "SIR" | "STR";
}

export interface TargetRow {
  descriptor: string;
  intermediate: string;
  cluster_id: number;
  report: RatioReportData | null;
  flags: string[];
  disjoint: boolean;
  evidence: string[];
  title_warnings: string[];
}

export interface SuggestionRow {
  cluster_id: number;
  label: string;
  score: number | null;
  sir: number | null;
  flags: string[];
}

export interface AuditEntry {
  seq: number;
  timestamp: string;
  action: string;
  detail: Record<string, unknown>;
}

export interface IntermediateEntry {
  descriptor: string;
  cluster_id: number;
  corpus_id: string | null;
  diagram: DiagramPayload | null;
}

export interface SessionView {
  schema: typeof SESSION_SCHEMA;
  schema_version: number;
  session_id: string;
  config: Record<string, unknown>;
  source: {
    corpus_id: string;
    descriptor: string;
    vocabulary: string[];
    diagram: DiagramPayload;
  };
  intermediates: IntermediateEntry[];
  target_candidates: TargetRow[];
  audit_log: AuditEntry[];
  /** Present on the response to the matching action only. */
  targets?: TargetRow[];
  suggestions?: SuggestionRow[];
}

export interface CorpusUpload {
  schema: string;
  corpus_id: string;
  diagram_id: string;
}

/** Raised when a payload is not a diagram document this UI understands. */
export class SchemaMismatchError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaMismatchError";
  }
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

/**
 * Validate a fetched diagram document.  Checks identity (schema name and
 * version) and the structural fields the views rely on; anything else in
 * the payload is passed through untouched.
 */
export function parseDiagramPayload(data: unknown): DiagramPayload {
  if (!isRecord(data)) {
    throw new SchemaMismatchError("diagram payload is not a JSON object");
  }
  if (data.schema !== DIAGRAM_SCHEMA) {
    throw new SchemaMismatchError(
      `expected schema ${JSON.stringify(DIAGRAM_SCHEMA)}, got ${JSON.stringify(data.schema)}`,
    );
  }
  if (data.schema_version !== SUPPORTED_SCHEMA_VERSION) {
    throw new SchemaMismatchError(
      `unsupported schema_version ${JSON.stringify(data.schema_version)}`,
    );
  }
  if (
    typeof data.median_density !== "number" ||
    typeof data.median_centrality !== "number" ||
    !Array.isArray(data.clusters)
  ) {
    throw new SchemaMismatchError("diagram payload is missing medians or clusters");
  }
  for (const entry of data.clusters) {
    if (
      !isRecord(entry) ||
      typeof entry.cluster_id !== "number" ||
      typeof entry.label !== "string" ||
      !Array.isArray(entry.members) ||
      typeof entry.density !== "number" ||
      typeof entry.centrality !== "number"
    ) {
      throw new SchemaMismatchError("diagram payload has a malformed cluster entry");
    }
  }
  return data as unknown as DiagramPayload;
}
