import { describe, expect, it } from "vitest";

import { GeobookClient } from "../src/api.js";
import {
  TreeViewModel,
  applyOpLocally,
  highlightsFromReport,
} from "../src/tree.js";
import type {
  BookCategory,
  ConsistencyReport,
  EditAck,
  EditOp,
} from "../src/types.js";

function category(id: string, children: BookCategory["children"]): BookCategory {
  return { kind: "category", id, title: id, children };
}

function leaf(id: string) {
  return { kind: "leaf" as const, id };
}

const SAMPLE = category("root", [
  category("sec1", [leaf("a"), leaf("b")]),
  category("sec2", [leaf("c")]),
]);

function report(violations: ConsistencyReport["violations"]): ConsistencyReport {
  return { ok: violations.length === 0, violations, checkedRelations: 0, elapsedMs: 0 };
}

describe("highlightsFromReport", () => {
  it("marks the node each violation names", () => {
    const map = highlightsFromReport(
      report([
        {
          kind: "OrderingViolation",
          severity: "error",
          message: "'a' must precede 'c'",
          source: "a",
          target: "c",
          relationKind: "Context",
          positions: { a: 2, c: 0 },
        },
        {
          kind: "MissingPrerequisite",
          severity: "error",
          message: "'c' needs 'ghost'",
          source: "ghost",
          target: "c",
          relationKind: "Context",
          positions: { c: 0 },
        },
      ]),
    );
    // the ordering violation highlights its source (the definition that
    // must move forward), not the theorem
    expect(map.get("a")?.severity).toBe("error");
    expect(map.get("a")?.messages).toHaveLength(1);
    // the missing prerequisite highlights the target; the absent source
    // has no node to mark
    expect(map.get("c")?.messages).toHaveLength(1);
    expect(map.has("ghost")).toBe(false);
  });

  it("is empty for a clean report", () => {
    expect(highlightsFromReport(report([])).size).toBe(0);
    expect(highlightsFromReport(null).size).toBe(0);
  });
});

describe("applyOpLocally", () => {
  it("moves a leaf between categories", () => {
    const moved = applyOpLocally(SAMPLE, {
      action: "move",
      nodeId: "c",
      newParent: "sec1",
      index: 0,
    });
    const sec1 = moved.children[0] as BookCategory;
    expect(sec1.children.map((n) => n.id)).toEqual(["c", "a", "b"]);
    // the original is untouched (immutability)
    expect((SAMPLE.children[0] as BookCategory).children).toHaveLength(2);
  });

  it("inserts and removes leaves", () => {
    const inserted = applyOpLocally(SAMPLE, {
      action: "insert",
      parent: "sec2",
      index: 1,
      leaf: "d",
    });
    expect((inserted.children[1] as BookCategory).children.map((n) => n.id)).toEqual([
      "c",
      "d",
    ]);
    const removed = applyOpLocally(inserted, { action: "remove", nodeId: "a" });
    expect((removed.children[0] as BookCategory).children.map((n) => n.id)).toEqual([
      "b",
    ]);
  });

  it("renames a category", () => {
    const renamed = applyOpLocally(SAMPLE, {
      action: "rename",
      nodeId: "sec2",
      title: "Renamed",
    });
    expect((renamed.children[1] as BookCategory).title).toBe("Renamed");
  });
});

class FakeClient extends GeobookClient {
  acks: EditAck[] = [];
  posted: { serial: number; op: EditOp }[] = [];
  conflictOnce = false;
  snapshotSerial = 0;
  root: BookCategory = SAMPLE;

  constructor() {
    super("http://fake");
  }

  override async getBook(bookId: string) {
    return {
      book: { id: bookId, title: "t", root: this.root },
      serial: this.snapshotSerial,
      report: report([]),
    };
  }

  override async postEdit(_bookId: string, serial: number, op: EditOp): Promise<EditAck> {
    if (this.conflictOnce) {
      this.conflictOnce = false;
      const { ConflictError } = await import("../src/api.js");
      throw new ConflictError(409, "stale serial");
    }
    this.posted.push({ serial, op });
    const ack: EditAck = {
      bookId: "bk",
      serial: serial + 1,
      report: report([]),
    };
    this.acks.push(ack);
    return ack;
  }
}

describe("TreeViewModel", () => {
  it("applies edits optimistically and reconciles serials in order", async () => {
    const client = new FakeClient();
    const model = new TreeViewModel(client, "bk", await client.getBook("bk"));
    const done: Promise<void>[] = [];
    for (let i = 0; i < 10; i++) {
      const parent = i % 2 ? "sec1" : "sec2";
      done.push(model.applyEdit({ action: "move", nodeId: "a", newParent: parent, index: 0 }));
    }
    expect(model.pending).toBeGreaterThan(0);
    await Promise.all(done);
    await model.settled();
    expect(model.pending).toBe(0);
    // one in flight at a time means serials were strictly sequential
    expect(client.posted.map((p) => p.serial)).toEqual([0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
    expect(model.serial).toBe(10);
  });

  it("refetches and replays after a conflict", async () => {
    const client = new FakeClient();
    const model = new TreeViewModel(client, "bk", await client.getBook("bk"));
    client.conflictOnce = true;
    client.snapshotSerial = 5; // another author advanced the book
    await model.applyEdit({ action: "move", nodeId: "c", newParent: "sec1", index: 0 });
    await model.settled();
    expect(client.posted).toHaveLength(1);
    expect(client.posted[0].serial).toBe(5); // replayed under the fresh serial
    expect(model.serial).toBe(6);
    const sec1 = model.root.children[0] as BookCategory;
    expect(sec1.children[0].id).toBe("c");
  });

  it("exposes highlights for exactly the acknowledged serial", async () => {
    const client = new FakeClient();
    const model = new TreeViewModel(client, "bk", await client.getBook("bk"));
    model.acceptReport(1, report([
      {
        kind: "OrderingViolation",
        severity: "error",
        message: "violation",
        source: "a",
        target: "b",
        relationKind: "Context",
        positions: { a: 1, b: 0 },
      },
    ]));
    expect(model.highlightFor("a")?.severity).toBe("error");
    // stale events (lower serial) must not clobber newer state
    model.acceptReport(0, report([]));
    expect(model.highlightFor("a")).toBeDefined();
    model.acceptReport(2, report([]));
    expect(model.highlightFor("a")).toBeUndefined();
  });
});
