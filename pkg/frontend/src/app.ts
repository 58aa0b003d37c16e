/** DOM application: tree editor, document preview, prover panel,
 * draggable figure canvas.  All state shown here is server state; the
 * view models in tree.ts / figure.ts own the traffic.
 */

import { GeobookClient } from "./api.js";
import { FigureViewModel } from "./figure.js";
import { TreeViewModel } from "./tree.js";
import type { BookCategory, BookNode, ObjectSummary } from "./types.js";

export interface AppOptions {
  base: string;
  bookId?: string;
  document?: Document;
}

export class App {
  client: GeobookClient;
  doc: Document;
  rootElement!: HTMLElement;
  tree: TreeViewModel | null = null;
  figure: FigureViewModel | null = null;
  private events: { close(): void } | null = null;
  private dragSource: string | null = null;
  private canvasScale = { scale: 40, ox: 320, oy: 240 };

  constructor(private options: AppOptions) {
    this.client = new GeobookClient(options.base);
    this.doc = options.document ?? document;
  }

  // --- boot -----------------------------------------------------------

  async start(container: HTMLElement): Promise<void> {
    this.rootElement = container;
    container.innerHTML = `
      <header class="topbar">
        <h1>geobook</h1>
        <span id="book-title"></span>
        <span id="serial" class="pill"></span>
        <span id="status" class="pill"></span>
      </header>
      <main class="columns">
        <section id="tree-panel" class="panel">
          <h2>Textbook</h2>
          <div id="tree"></div>
          <div class="toolbar">
            <button id="add-object">New object…</button>
            <button id="fetch-object">Fetch from base…</button>
          </div>
        </section>
        <section id="detail-panel" class="panel">
          <h2>Object</h2>
          <div id="object-detail">Select a node.</div>
          <div class="toolbar">
            <button id="prove" disabled>Prove</button>
            <button id="show-figure" disabled>Figure</button>
            <button id="discover" disabled>Discover relations</button>
          </div>
          <div id="prover-output"></div>
          <div id="figure-wrap" hidden>
            <svg id="figure" width="640" height="480"></svg>
            <div id="figure-readout"></div>
          </div>
        </section>
        <section id="preview-panel" class="panel">
          <h2>Preview <select id="locale"><option>en</option><option>zh</option></select></h2>
          <div id="preview"></div>
        </section>
      </main>
      <dialog id="dialog"></dialog>
    `;
    const books = await this.client.listBooks();
    const bookId = this.options.bookId ?? books.books[0]?.id;
    if (!bookId) {
      this.setStatus("no books on the server");
      return;
    }
    this.tree = await TreeViewModel.open(this.client, bookId);
    this.tree.onChange(() => this.renderTree());
    this.events = this.client.bookEvents(bookId, (event) => {
      if (event.event === "report") {
        const payload = event.data as { serial: number; report: never };
        this.tree?.acceptReport(payload.serial, payload.report);
      }
    });
    this.bindToolbar();
    this.renderTree();
    void this.renderPreview();
  }

  stop(): void {
    this.events?.close();
  }

  setStatus(text: string): void {
    const el = this.doc.getElementById("status");
    if (el) el.textContent = text;
  }

  // --- tree -----------------------------------------------------------

  renderTree(): void {
    const host = this.doc.getElementById("tree");
    const tree = this.tree;
    if (!host || !tree) return;
    const title = this.doc.getElementById("book-title");
    if (title) title.textContent = tree.title;
    const serial = this.doc.getElementById("serial");
    if (serial) {
      serial.textContent = tree.pending
        ? `serial ${tree.serial} (+${tree.pending} pending)`
        : `serial ${tree.serial}`;
    }
    host.innerHTML = "";
    host.appendChild(this.categoryElement(tree.root, true));
    void this.renderPreview();
  }

  private categoryElement(node: BookCategory, isRoot: boolean): HTMLElement {
    const wrap = this.doc.createElement("div");
    wrap.className = "category";
    wrap.dataset.id = node.id;
    const label = this.doc.createElement("div");
    label.className = "category-label";
    label.textContent = node.title || node.id;
    label.dataset.id = node.id;
    if (!isRoot) this.decorateNode(label, node.id, true);
    wrap.appendChild(label);
    const list = this.doc.createElement("div");
    list.className = "children";
    list.dataset.parent = node.id;
    this.allowDrop(list, node.id);
    for (const child of node.children) {
      list.appendChild(
        child.kind === "category"
          ? this.categoryElement(child, false)
          : this.leafElement(child),
      );
    }
    wrap.appendChild(list);
    return wrap;
  }

  private leafElement(node: BookNode & { kind: "leaf" }): HTMLElement {
    const el = this.doc.createElement("div");
    el.className = "leaf";
    el.dataset.id = node.id;
    el.textContent = node.id;
    void this.client.getObject(node.id).then((obj) => {
      el.textContent = `${obj.kind}: ${obj.name}`;
      el.title = obj.name;
    }).catch(() => {
      el.classList.add("dangling");
    });
    this.decorateNode(el, node.id, false);
    el.addEventListener("click", () => void this.showObject(node.id));
    return el;
  }

  /** highlight + drag wiring shared by leaves and category labels */
  private decorateNode(el: HTMLElement, nodeId: string, isCategory: boolean): void {
    const highlight = this.tree?.highlightFor(nodeId);
    if (highlight) {
      el.classList.add(
        highlight.severity === "error" ? "violation-error" : "violation-warning",
      );
      el.title = highlight.messages.join("\n");
    }
    el.draggable = true;
    el.addEventListener("dragstart", (event) => {
      this.dragSource = nodeId;
      (event as DragEvent).dataTransfer?.setData("text/plain", nodeId);
    });
    if (isCategory) this.attachContextMenu(el, nodeId);
  }

  private allowDrop(list: HTMLElement, parentId: string): void {
    list.addEventListener("dragover", (event) => event.preventDefault());
    list.addEventListener("drop", (event) => {
      event.preventDefault();
      const nodeId =
        (event as DragEvent).dataTransfer?.getData("text/plain") || this.dragSource;
      if (!nodeId || !this.tree) return;
      const index = list.querySelectorAll(":scope > .leaf, :scope > .category").length;
      void this.moveNode(nodeId, parentId, index);
    });
  }

  /** The single edit entry point the e2e tests drive. */
  moveNode(nodeId: string, newParent: string, index: number): Promise<void> {
    if (!this.tree) return Promise.resolve();
    return this.tree.applyEdit({ action: "move", nodeId, newParent, index });
  }

  insertLeaf(objectId: string, parent: string, index: number): Promise<void> {
    if (!this.tree) return Promise.resolve();
    return this.tree.applyEdit({ action: "insert", parent, index, leaf: objectId });
  }

  removeNode(nodeId: string): Promise<void> {
    if (!this.tree) return Promise.resolve();
    return this.tree.applyEdit({ action: "remove", nodeId });
  }

  private attachContextMenu(el: HTMLElement, categoryId: string): void {
    el.addEventListener("contextmenu", (event) => {
      event.preventDefault();
      const title = this.promptDialog(`Rename ${categoryId}`);
      if (title && this.tree) {
        void this.tree.applyEdit({ action: "rename", nodeId: categoryId, title });
      }
    });
  }

  private promptDialog(label: string): string | null {
    // happy-dom and browsers both support window.prompt; dialogs with
    // forms are overkill for a rename
    const win = this.doc.defaultView as (Window & typeof globalThis) | null;
    return win?.prompt ? win.prompt(label) : null;
  }

  // --- object detail, dialogs -------------------------------------------

  async showObject(objectId: string): Promise<void> {
    const detail = this.doc.getElementById("object-detail");
    if (!detail) return;
    const obj = await this.client.getObject(objectId);
    detail.innerHTML = "";
    const heading = this.doc.createElement("h3");
    heading.textContent = `${obj.kind}: ${obj.name}`;
    heading.dataset.id = obj.id;
    detail.appendChild(heading);
    const text = this.doc.createElement("p");
    text.textContent = obj.natural["en"] ?? "";
    detail.appendChild(text);
    if (obj.formal) {
      const pre = this.doc.createElement("pre");
      pre.className = "formal";
      pre.textContent = obj.formal;
      detail.appendChild(pre);
    }
    const prove = this.doc.getElementById("prove") as HTMLButtonElement | null;
    const fig = this.doc.getElementById("show-figure") as HTMLButtonElement | null;
    const disc = this.doc.getElementById("discover") as HTMLButtonElement | null;
    for (const button of [prove, fig, disc]) {
      if (button) {
        button.disabled = !obj.formal;
        button.dataset.target = obj.id;
      }
    }
  }

  private bindToolbar(): void {
    this.doc.getElementById("prove")?.addEventListener("click", (event) => {
      const id = (event.currentTarget as HTMLElement).dataset.target;
      if (id) void this.runProver(id);
    });
    this.doc.getElementById("show-figure")?.addEventListener("click", (event) => {
      const id = (event.currentTarget as HTMLElement).dataset.target;
      if (id) void this.openFigure(id);
    });
    this.doc.getElementById("discover")?.addEventListener("click", (event) => {
      const id = (event.currentTarget as HTMLElement).dataset.target;
      if (id) void this.runDiscovery(id);
    });
    this.doc.getElementById("locale")?.addEventListener("change", () => {
      void this.renderPreview();
    });
    this.doc.getElementById("add-object")?.addEventListener("click", () => {
      void this.newObjectDialog();
    });
    this.doc.getElementById("fetch-object")?.addEventListener("click", () => {
      void this.fetchObjectDialog();
    });
  }

  async runProver(objectId: string): Promise<void> {
    const out = this.doc.getElementById("prover-output");
    if (!out) return;
    out.textContent = "proving…";
    const result = await this.client.prove(objectId);
    out.innerHTML = "";
    const status = this.doc.createElement("div");
    status.className = `prove-status prove-${result.status}`;
    status.textContent = result.status;
    out.appendChild(status);
    for (const [direction, detail] of Object.entries(result.directions)) {
      const block = this.doc.createElement("div");
      block.className = "prove-direction";
      const lines = detail.nondegeneracy.map((c) => `${c} ≠ 0`).join("; ");
      block.textContent = `${direction}: ${detail.status}${lines ? ` (requires ${lines})` : ""}`;
      out.appendChild(block);
    }
  }

  async runDiscovery(objectId: string): Promise<void> {
    const result = await this.client.discover(objectId);
    const accepted = await this.client.acceptCandidates(result.candidates);
    this.setStatus(
      `discovered ${result.candidates.length} relation(s), stored ${accepted.added}`,
    );
  }

  async renderPreview(): Promise<void> {
    const host = this.doc.getElementById("preview");
    const locale =
      (this.doc.getElementById("locale") as HTMLSelectElement | null)?.value ?? "en";
    if (!host || !this.tree) return;
    try {
      const page = await this.client.renderHtml(this.tree.bookId, locale);
      const body = page.match(/<body>([\s\S]*)<\/body>/)?.[1] ?? page;
      host.innerHTML = body;
    } catch {
      host.textContent = "(preview unavailable)";
    }
  }

  private async newObjectDialog(): Promise<void> {
    const name = this.promptDialog("Object name");
    if (!name || !this.tree) return;
    const created = await this.client.createObject({
      kind: "Remark",
      name,
      keywords: [],
      natural: { en: name },
    });
    await this.insertLeaf(created.id, this.tree.root.id, this.tree.root.children.length);
  }

  private async fetchObjectDialog(): Promise<void> {
    const words = this.promptDialog("Keywords (comma-separated)");
    if (!words || !this.tree) return;
    const found = await this.client.listObjects(words.split(","));
    const first: ObjectSummary | undefined = found.objects[0];
    if (first) {
      await this.insertLeaf(first.id, this.tree.root.id, this.tree.root.children.length);
    } else {
      this.setStatus("no objects matched");
    }
  }

  // --- figure ------------------------------------------------------------

  async openFigure(objectId: string): Promise<void> {
    const wrap = this.doc.getElementById("figure-wrap");
    if (wrap) wrap.hidden = false;
    this.figure = new FigureViewModel(this.client, objectId);
    this.figure.onChange(() => this.renderFigure());
    await this.figure.load();
    this.bindFigurePointer();
    this.renderFigure();
  }

  toCanvas(x: number, y: number): [number, number] {
    const { scale, ox, oy } = this.canvasScale;
    return [ox + x * scale, oy - y * scale];
  }

  fromCanvas(px: number, py: number): [number, number] {
    const { scale, ox, oy } = this.canvasScale;
    return [(px - ox) / scale, (oy - py) / scale];
  }

  renderFigure(): void {
    const svg = this.doc.getElementById("figure");
    const readout = this.doc.getElementById("figure-readout");
    const model = this.figure;
    if (!svg || !model?.state) return;
    const state = model.state;
    const parts: string[] = [];
    for (const [name, coords] of Object.entries(state.coordinates)) {
      const kind = state.kinds[name] ?? "";
      if (kind === "line" || kind === "perp_bisector" || kind === "perp_line" || kind === "parallel_line") {
        parts.push(this.lineSvg(name, coords));
      } else if (kind === "circumcircle" || kind === "circle") {
        const [cx, cy, r2] = coords;
        const [px, py] = this.toCanvas(cx, cy);
        const radius = Math.sqrt(Math.max(r2, 0)) * this.canvasScale.scale;
        parts.push(
          `<circle class="circle" data-name="${name}" cx="${px}" cy="${py}" r="${radius}" fill="none"/>`,
        );
      }
    }
    for (const [name, coords] of Object.entries(state.coordinates)) {
      const kind = state.kinds[name] ?? "";
      if (
        kind === "line" || kind === "perp_bisector" || kind === "perp_line" ||
        kind === "parallel_line" || kind === "circumcircle" || kind === "circle"
      ) {
        continue;
      }
      const [px, py] = this.toCanvas(coords[0], coords[1]);
      const draggable = model.handleFor(name) !== null;
      parts.push(
        `<circle class="point${draggable ? " draggable" : ""}" data-name="${name}" cx="${px}" cy="${py}" r="${draggable ? 7 : 4}"/>` +
          `<text data-label="${name}" x="${px + 8}" y="${py - 8}">${name.replace(/^_/, "")}</text>`,
      );
    }
    svg.innerHTML = parts.join("");
    if (readout) {
      const residual = state.conclusionResidual;
      readout.innerHTML =
        `<span id="residual" data-value="${residual}">conclusion residual: ${residual.toExponential(2)}</span>` +
        (state.degenerate
          ? ' <span id="degenerate" class="badge">degenerate</span>'
          : "");
    }
  }

  private lineSvg(name: string, coords: number[]): string {
    // clip ax + by + c = 0 against a generous world box
    const [a, b, c] = coords;
    const box = 20;
    const points: [number, number][] = [];
    if (Math.abs(b) > 1e-12) {
      for (const x of [-box, box]) points.push([x, (-c - a * x) / b]);
    } else if (Math.abs(a) > 1e-12) {
      for (const y of [-box, box]) points.push([(-c - b * y) / a, y]);
    }
    if (points.length < 2) return "";
    const [p1, p2] = points.map(([x, y]) => this.toCanvas(x, y));
    return `<line class="line" data-name="${name}" x1="${p1[0]}" y1="${p1[1]}" x2="${p2[0]}" y2="${p2[1]}"/>`;
  }

  private bindFigurePointer(): void {
    const svg = this.doc.getElementById("figure");
    if (!svg) return;
    svg.addEventListener("pointerdown", (event) => {
      const target = event.target as HTMLElement;
      const name = target?.dataset?.name;
      if (name && this.figure?.handleFor(name)) {
        this.figure.beginDragPoint(name);
      }
    });
    svg.addEventListener("pointermove", (event) => {
      const pointer = event as PointerEvent;
      const [x, y] = this.fromCanvas(pointer.offsetX ?? 0, pointer.offsetY ?? 0);
      this.figure?.dragTo(x, y);
    });
    svg.addEventListener("pointerup", () => this.figure?.endDrag());
  }
}

export async function boot(options: AppOptions): Promise<App> {
  const app = new App(options);
  const doc = options.document ?? document;
  const container = doc.getElementById("app");
  if (!container) throw new Error("missing #app container");
  await app.start(container as HTMLElement);
  return app;
}
