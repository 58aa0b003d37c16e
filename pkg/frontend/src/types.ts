/** Wire types mirroring the service's documented JSON schemas. */

export interface ObjectSummary {
  id: string;
  kind: string;
  name: string;
}

export interface KnowledgeObject {
  type: "object" | "category";
  id: string;
  kind: string;
  name: string;
  keywords: string[];
  natural: Record<string, string>;
  formal: string | null;
  algebraic: string | null;
  diagram: string | null;
}

export interface Violation {
  kind: string;
  severity: "error" | "warning";
  message: string;
  source: string | null;
  target: string | null;
  relationKind: string | null;
  positions: Record<string, number>;
}

export interface ConsistencyReport {
  ok: boolean;
  violations: Violation[];
  checkedRelations: number;
  elapsedMs: number;
}

export type BookNode = BookCategory | BookLeaf;

export interface BookCategory {
  kind: "category";
  id: string;
  title: string;
  children: BookNode[];
}

export interface BookLeaf {
  kind: "leaf";
  id: string;
}

export interface BookSnapshot {
  book: { id: string; title: string; root: BookCategory };
  serial: number;
  report: ConsistencyReport | null;
}

export type EditOp =
  | { action: "insert"; parent: string; index: number; leaf?: string; categoryId?: string; categoryTitle?: string }
  | { action: "remove"; nodeId: string }
  | { action: "move"; nodeId: string; newParent: string; index: number }
  | { action: "rename"; nodeId: string; title: string };

export interface EditAck {
  bookId: string;
  serial: number;
  report: ConsistencyReport | null;
}

export interface RelationCandidate {
  source: string;
  target: string;
  kind: string;
  evidence: string[];
  ambiguousDefiner: boolean;
  targetFingerprint: string;
}

export interface DiscoveryResponse {
  target: string;
  candidates: RelationCandidate[];
  warnings: string[];
}

export interface FigureStep {
  op: string;
  out: string;
  args: string[];
  params: string[];
}

export interface FigureCheck {
  pred: string;
  args: string[];
}

export interface FigureState {
  objectId: string;
  coordinates: Record<string, number[]>;
  kinds: Record<string, string>;
  degenerate: boolean;
  conclusionResidual: number;
  free: Record<string, number[] | number>;
  steps: FigureStep[];
  conclusion: FigureCheck[];
}

export interface ProveDirection {
  status: string;
  nondegeneracy: string[];
  coordinates: Record<string, string[]>;
  counterexample: unknown;
  trace: unknown[];
}

export interface ProveResponse {
  objectId: string;
  status: string;
  directions: Record<string, ProveDirection>;
}
