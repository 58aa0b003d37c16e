/** Dynamic figure view-model.
 *
 * Holds the construction steps, the user's current free-point
 * coordinates, and the derived coordinates exactly as the most recent
 * `/figure/evaluate` response reported them - the client draws,
 * never computes geometry.  Dragging is throttled to at most one
 * evaluation request per animation frame; releasing a point without
 * movement issues no request.
 */

import { GeobookClient } from "./api.js";
import type { FigureState } from "./types.js";

export type FrameScheduler = (callback: () => void) => void;

const defaultScheduler: FrameScheduler =
  typeof requestAnimationFrame === "function"
    ? (callback) => requestAnimationFrame(() => callback())
    : (callback) => setTimeout(callback, 16);

export interface FigureListener {
  (model: FigureViewModel): void;
}

export class FigureViewModel {
  state: FigureState | null = null;
  /** what the user is asking for; confirmed values live in state.free */
  freeInputs: Record<string, number[] | number> = {};
  evaluating = false;
  requestsIssued = 0;

  private dirty = false;
  private frameQueued = false;
  private dragging: string | null = null;
  private listeners: FigureListener[] = [];
  private settle: (() => void)[] = [];

  constructor(
    private client: GeobookClient,
    public objectId: string,
    private scheduler: FrameScheduler = defaultScheduler,
  ) {}

  onChange(listener: FigureListener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this);
  }

  async load(): Promise<void> {
    this.state = await this.client.evaluateFigure(this.objectId);
    this.requestsIssued += 1;
    this.freeInputs = { ...this.state.free };
    this.notify();
  }

  /** Resolves when no evaluation is queued or in flight. */
  settled(): Promise<void> {
    if (!this.dirty && !this.frameQueued && !this.evaluating) {
      return Promise.resolve();
    }
    return new Promise((resolve) => this.settle.push(resolve));
  }

  isFree(name: string): boolean {
    return this.state !== null && name in this.state.free;
  }

  beginDrag(name: string): void {
    if (!this.isFree(name)) return;
    this.dragging = name;
  }

  /** Pointer motion while dragging a free point (canvas coordinates). */
  dragTo(x: number, y: number): void {
    if (!this.dragging || !this.state) return;
    const name = this.dragging;
    const current = this.state.free[name];
    if (Array.isArray(current)) {
      this.freeInputs[name] = [x, y];
    } else {
      // an angle-parameterized point: map the pointer to the angle seen
      // from the carrying circle's last reported center
      const theta = this.angleFor(name, x, y);
      if (theta === null) return;
      this.freeInputs[name] = theta;
    }
    this.requestEvaluation();
  }

  endDrag(): void {
    // releasing without movement issued no request: only dragTo queues one
    this.dragging = null;
  }

  setFree(name: string, value: number[] | number): void {
    this.freeInputs[name] = value;
    this.requestEvaluation();
  }

  private angleFor(paramName: string, x: number, y: number): number | null {
    const state = this.state;
    if (!state) return null;
    const step = state.steps.find((s) => s.params.includes(paramName));
    if (!step || step.op !== "point_on_circle") return null;
    const circle = state.coordinates[step.args[0]];
    if (!circle) return null;
    return Math.atan2(y - circle[1], x - circle[0]);
  }

  /** At most one in-flight evaluation per animation frame. */
  private requestEvaluation(): void {
    this.dirty = true;
    if (this.frameQueued) return;
    this.frameQueued = true;
    this.scheduler(() => {
      this.frameQueued = false;
      void this.flush();
    });
  }

  private async flush(): Promise<void> {
    if (this.evaluating || !this.dirty) return;
    this.dirty = false;
    this.evaluating = true;
    try {
      this.state = await this.client.evaluateFigure(this.objectId, {
        ...this.freeInputs,
      });
      this.requestsIssued += 1;
    } finally {
      this.evaluating = false;
      this.notify();
      if (this.dirty) {
        this.requestEvaluation();
      } else {
        for (const resolve of this.settle.splice(0)) resolve();
      }
    }
  }

  /** Point name of the step a parameter drives (for hit-testing). */
  pointForParam(paramName: string): string | null {
    const step = this.state?.steps.find((s) => s.params.includes(paramName));
    return step ? step.out : null;
  }

  draggableNames(): string[] {
    if (!this.state) return [];
    const names: string[] = [];
    for (const key of Object.keys(this.state.free)) {
      if (Array.isArray(this.state.free[key])) names.push(key);
      else {
        const owner = this.pointForParam(key);
        if (owner) names.push(owner);
      }
    }
    return names;
  }

  /** The free handle (point name or parameter owner) for a point. */
  handleFor(pointName: string): string | null {
    if (!this.state) return null;
    if (Array.isArray(this.state.free[pointName])) return pointName;
    const step = this.state.steps.find((s) => s.out === pointName);
    if (step && step.params.length) return pointName;
    return null;
  }

  beginDragPoint(pointName: string): void {
    if (!this.state) return;
    if (Array.isArray(this.state.free[pointName])) {
      this.beginDrag(pointName);
      return;
    }
    const step = this.state.steps.find((s) => s.out === pointName);
    if (step && step.params.length === 1) {
      this.dragging = step.params[0];
    }
  }
}
