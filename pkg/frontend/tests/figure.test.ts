import { describe, expect, it } from "vitest";

import { GeobookClient } from "../src/api.js";
import { FigureViewModel } from "../src/figure.js";
import type { FigureState } from "../src/types.js";

function simsonLikeState(theta: number): FigureState {
  return {
    objectId: "obj-000011",
    coordinates: {
      A: [0, 0, 0],
      _circumcircle1: [2, 1.5, 6.25],
      D: [2 + 2.5 * Math.cos(theta), 1.5 + 2.5 * Math.sin(theta), 0],
    },
    kinds: { A: "free_point", _circumcircle1: "circumcircle", D: "point_on_circle" },
    degenerate: false,
    conclusionResidual: 1e-14,
    free: { A: [0, 0], theta_D: theta },
    steps: [
      { op: "free_point", out: "A", args: [], params: [] },
      { op: "circumcircle", out: "_circumcircle1", args: ["A", "B", "C"], params: [] },
      { op: "point_on_circle", out: "D", args: ["_circumcircle1"], params: ["theta_D"] },
    ],
    conclusion: [{ pred: "collinear", args: ["_foot1", "_foot2", "_foot3"] }],
  };
}

class FakeFigureClient extends GeobookClient {
  calls: (Record<string, number[] | number> | undefined)[] = [];

  constructor() {
    super("http://fake");
  }

  override async evaluateFigure(
    _objectId: string,
    assignment?: Record<string, number[] | number>,
  ): Promise<FigureState> {
    this.calls.push(assignment);
    const theta = (assignment?.["theta_D"] as number | undefined) ?? 0.5;
    return simsonLikeState(theta);
  }
}

/** A scheduler the test pumps by hand, one frame at a time. */
function manualScheduler() {
  const queue: (() => void)[] = [];
  return {
    schedule: (callback: () => void) => queue.push(callback),
    async frame() {
      const jobs = queue.splice(0);
      for (const job of jobs) job();
      await Promise.resolve();
      await new Promise((resolve) => setTimeout(resolve, 0));
    },
  };
}

describe("FigureViewModel", () => {
  it("issues at most one evaluation per animation frame while dragging", async () => {
    const client = new FakeFigureClient();
    const frames = manualScheduler();
    const model = new FigureViewModel(client, "obj-000011", frames.schedule);
    await model.load();
    expect(client.calls).toHaveLength(1);

    model.beginDragPoint("D");
    // a burst of pointer moves within a single frame
    for (let i = 0; i < 25; i++) {
      model.dragTo(2 + Math.cos(i / 5), 1.5 + Math.sin(i / 5));
    }
    expect(client.calls).toHaveLength(1); // nothing sent yet
    await frames.frame();
    expect(client.calls).toHaveLength(2); // exactly one request for the burst
    model.endDrag();
    await model.settled();
    expect(client.calls.length).toBeLessThanOrEqual(3);
  });

  it("maps pointer positions to the carrying circle's angle", async () => {
    const client = new FakeFigureClient();
    const frames = manualScheduler();
    const model = new FigureViewModel(client, "obj-000011", frames.schedule);
    await model.load();
    model.beginDragPoint("D");
    model.dragTo(2, 1.5 + 9); // straight above the center
    await frames.frame();
    await model.settled();
    const sent = client.calls.at(-1)!;
    expect(sent["theta_D"]).toBeCloseTo(Math.PI / 2, 10);
  });

  it("release without movement issues no request", async () => {
    const client = new FakeFigureClient();
    const frames = manualScheduler();
    const model = new FigureViewModel(client, "obj-000011", frames.schedule);
    await model.load();
    const before = client.calls.length;
    model.beginDragPoint("D");
    model.endDrag();
    await frames.frame();
    await model.settled();
    expect(client.calls.length).toBe(before);
  });

  it("derived coordinates always come from the latest evaluation", async () => {
    const client = new FakeFigureClient();
    const frames = manualScheduler();
    const model = new FigureViewModel(client, "obj-000011", frames.schedule);
    await model.load();
    model.setFree("theta_D", 1.25);
    await frames.frame();
    await model.settled();
    const reported = client.calls.at(-1)!["theta_D"] as number;
    expect(reported).toBe(1.25);
    // the view model exposes exactly what the server replied for D
    const d = model.state!.coordinates["D"];
    expect(d[0]).toBeCloseTo(2 + 2.5 * Math.cos(1.25), 12);
    expect(d[1]).toBeCloseTo(1.5 + 2.5 * Math.sin(1.25), 12);
  });

  it("dragging a plain free point sends coordinates", async () => {
    const client = new FakeFigureClient();
    const frames = manualScheduler();
    const model = new FigureViewModel(client, "obj-000011", frames.schedule);
    await model.load();
    model.beginDragPoint("A");
    model.dragTo(-1.5, 2.5);
    await frames.frame();
    await model.settled();
    expect(client.calls.at(-1)!["A"]).toEqual([-1.5, 2.5]);
  });
});
