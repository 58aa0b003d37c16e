/** Textbook tree view-model.
 *
 * Mirrors the server's book tree, applies edits optimistically, and
 * keeps at most one edit in flight per book: further edits queue
 * behind the serial they will be sent under.  Highlights always come
 * from the server's consistency report for the latest acknowledged
 * serial; the client never computes consistency itself.  A stale
 * serial (another author edited concurrently) triggers a refetch and
 * replay of the queued edits.
 */

import { ConflictError, GeobookClient } from "./api.js";
import type {
  BookCategory,
  BookNode,
  ConsistencyReport,
  EditAck,
  EditOp,
} from "./types.js";

export interface NodeHighlight {
  severity: "error" | "warning";
  messages: string[];
}

export type HighlightMap = Map<string, NodeHighlight>;

/** A violation highlights the node it names: the source when it is in
 * the book (the definition that must come first), otherwise the target
 * (whose prerequisite is absent). */
export function highlightsFromReport(
  report: ConsistencyReport | null,
): HighlightMap {
  const map: HighlightMap = new Map();
  if (!report) return map;
  for (const violation of report.violations) {
    const positions = violation.positions ?? {};
    const id =
      violation.source && violation.source in positions
        ? violation.source
        : violation.target && violation.target in positions
          ? violation.target
          : null;
    if (!id) continue;
    const existing = map.get(id);
    if (existing) {
      existing.messages.push(violation.message);
      if (violation.severity === "error") existing.severity = "error";
    } else {
      map.set(id, {
        severity: violation.severity,
        messages: [violation.message],
      });
    }
  }
  return map;
}

function cloneTree(node: BookCategory): BookCategory {
  return {
    kind: "category",
    id: node.id,
    title: node.title,
    children: node.children.map((child) =>
      child.kind === "category" ? cloneTree(child) : { ...child },
    ),
  };
}

function nodeKey(node: BookNode): string {
  return node.id;
}

function findParent(
  root: BookCategory,
  nodeId: string,
): { parent: BookCategory; index: number } | null {
  for (let i = 0; i < root.children.length; i++) {
    if (nodeKey(root.children[i]) === nodeId) return { parent: root, index: i };
    const child = root.children[i];
    if (child.kind === "category") {
      const found = findParent(child, nodeId);
      if (found) return found;
    }
  }
  return null;
}

function findCategory(root: BookCategory, id: string): BookCategory | null {
  if (root.id === id) return root;
  for (const child of root.children) {
    if (child.kind === "category") {
      const found = findCategory(child, id);
      if (found) return found;
    }
  }
  return null;
}

/** Local mirror of a structural edit; the server stays authoritative. */
export function applyOpLocally(root: BookCategory, op: EditOp): BookCategory {
  const tree = cloneTree(root);
  if (op.action === "insert") {
    const parent = findCategory(tree, op.parent);
    if (!parent) return tree;
    const node: BookNode = op.leaf
      ? { kind: "leaf", id: op.leaf }
      : {
          kind: "category",
          id: op.categoryId ?? "",
          title: op.categoryTitle ?? "",
          children: [],
        };
    parent.children.splice(op.index, 0, node);
  } else if (op.action === "remove") {
    const found = findParent(tree, op.nodeId);
    if (found) found.parent.children.splice(found.index, 1);
  } else if (op.action === "move") {
    const found = findParent(tree, op.nodeId);
    if (!found) return tree;
    const [node] = found.parent.children.splice(found.index, 1);
    const target = findCategory(tree, op.newParent);
    if (!target) return tree;
    target.children.splice(op.index, 0, node);
  } else if (op.action === "rename") {
    const target = findCategory(tree, op.nodeId);
    if (target) target.title = op.title;
  }
  return tree;
}

export interface TreeListener {
  (model: TreeViewModel): void;
}

export class TreeViewModel {
  root: BookCategory;
  title: string;
  /** serial of the last server-acknowledged edit */
  serial: number;
  /** highlights for exactly that serial */
  highlights: HighlightMap = new Map();
  report: ConsistencyReport | null = null;
  pending = 0; // queued + in-flight edits

  private queue: EditOp[] = [];
  private inFlight = false;
  private listeners: TreeListener[] = [];
  private drained: (() => void)[] = [];

  constructor(
    private client: GeobookClient,
    public bookId: string,
    snapshot: { book: { title: string; root: BookCategory }; serial: number; report: ConsistencyReport | null },
  ) {
    this.root = snapshot.book.root;
    this.title = snapshot.book.title;
    this.serial = snapshot.serial;
    this.acceptReport(snapshot.serial, snapshot.report);
  }

  static async open(client: GeobookClient, bookId: string): Promise<TreeViewModel> {
    return new TreeViewModel(client, bookId, await client.getBook(bookId));
  }

  onChange(listener: TreeListener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this);
  }

  /** Resolves once every queued edit has been acknowledged. */
  settled(): Promise<void> {
    if (!this.inFlight && this.queue.length === 0) return Promise.resolve();
    return new Promise((resolve) => this.drained.push(resolve));
  }

  acceptReport(serial: number, report: ConsistencyReport | null): void {
    if (serial < this.serial) return; // stale event
    this.serial = serial;
    this.report = report;
    this.highlights = highlightsFromReport(report);
    this.notify();
  }

  /** Optimistic apply + queued submission behind the current serial. */
  applyEdit(op: EditOp): Promise<void> {
    this.root = applyOpLocally(this.root, op);
    this.queue.push(op);
    this.pending = this.queue.length + (this.inFlight ? 1 : 0);
    this.notify();
    void this.pump();
    return this.settled();
  }

  private async pump(): Promise<void> {
    if (this.inFlight) return;
    const op = this.queue.shift();
    if (!op) {
      for (const resolve of this.drained.splice(0)) resolve();
      return;
    }
    this.inFlight = true;
    this.pending = this.queue.length + 1;
    try {
      const ack: EditAck = await this.client.postEdit(this.bookId, this.serial, op);
      this.acceptReport(ack.serial, ack.report);
    } catch (error) {
      if (error instanceof ConflictError) {
        // another author won the race: refetch, then replay our queue
        const replay = [op, ...this.queue.splice(0)];
        const snapshot = await this.client.getBook(this.bookId);
        this.root = snapshot.book.root;
        this.serial = snapshot.serial;
        this.acceptReport(snapshot.serial, snapshot.report);
        for (const queued of replay) {
          this.root = applyOpLocally(this.root, queued);
          this.queue.push(queued);
        }
      } else {
        // rejected edit (bad position, duplicate leaf, ...): resync
        const snapshot = await this.client.getBook(this.bookId);
        this.root = snapshot.book.root;
        this.acceptReport(snapshot.serial, snapshot.report);
      }
    } finally {
      this.inFlight = false;
      this.pending = this.queue.length;
      this.notify();
      void this.pump();
    }
  }

  /** Reading order of leaf ids (display only; the server validates). */
  leafIds(): string[] {
    const out: string[] = [];
    const walk = (node: BookCategory): void => {
      for (const child of node.children) {
        if (child.kind === "category") walk(child);
        else out.push(child.id);
      }
    };
    walk(this.root);
    return out;
  }

  highlightFor(nodeId: string): NodeHighlight | undefined {
    return this.highlights.get(nodeId);
  }
}
