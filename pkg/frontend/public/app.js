// src/api.ts
var ApiError = class extends Error {
  constructor(status, detail) {
    super(`HTTP ${status}: ${detail}`);
    this.status = status;
    this.detail = detail;
  }
};
var ConflictError = class extends ApiError {
};
async function request(url, init) {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body.detail) detail = body.detail;
    } catch {
    }
    if (response.status === 409) throw new ConflictError(409, detail);
    throw new ApiError(response.status, detail);
  }
  return await response.json();
}
function subscribeSse(url, handler) {
  const controller = new AbortController();
  const done = (async () => {
    const response = await fetch(url, {
      signal: controller.signal,
      headers: { accept: "text/event-stream" }
    });
    if (!response.ok || !response.body) {
      throw new ApiError(response.status, "event stream unavailable");
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    let eventName = "message";
    let dataLines = [];
    for (; ; ) {
      const { value, done: finished } = await reader.read();
      if (finished) break;
      buffer += decoder.decode(value, { stream: true });
      let newline;
      while ((newline = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, newline).replace(/\r$/, "");
        buffer = buffer.slice(newline + 1);
        if (line.startsWith("event: ")) {
          eventName = line.slice(7);
        } else if (line.startsWith("data: ")) {
          dataLines.push(line.slice(6));
        } else if (line === "") {
          if (dataLines.length) {
            handler({ event: eventName, data: JSON.parse(dataLines.join("\n")) });
          }
          eventName = "message";
          dataLines = [];
        }
      }
    }
  })().catch((error) => {
    if (!controller.signal.aborted && error.name !== "AbortError") {
      throw error;
    }
  });
  return { close: () => controller.abort(), done };
}
var GeobookClient = class {
  constructor(base2) {
    this.base = base2;
  }
  url(path) {
    return `${this.base}${path}`;
  }
  listObjects(keywords) {
    const suffix = keywords?.length ? `?keywords=${encodeURIComponent(keywords.join(","))}` : "";
    return request(this.url(`/objects${suffix}`));
  }
  getObject(id) {
    return request(this.url(`/objects/${id}`));
  }
  createObject(data) {
    return request(this.url("/objects"), {
      method: "POST",
      body: JSON.stringify(data)
    });
  }
  updateObject(id, data) {
    return request(this.url(`/objects/${id}`), {
      method: "PUT",
      body: JSON.stringify(data)
    });
  }
  queryRelation(params2, kind) {
    const search = new URLSearchParams();
    if (params2.source) search.set("source", params2.source);
    if (params2.target) search.set("target", params2.target);
    search.set("kind", kind);
    return request(this.url(`/relations?${search}`));
  }
  discover(objectId) {
    return request(this.url(`/discover/${objectId}`), { method: "POST" });
  }
  acceptCandidates(candidates) {
    return request(this.url("/discover/accept"), {
      method: "POST",
      body: JSON.stringify({ candidates })
    });
  }
  listBooks() {
    return request(this.url("/books"));
  }
  getBook(bookId) {
    return request(this.url(`/books/${bookId}`));
  }
  postEdit(bookId, serial, op) {
    return request(this.url(`/books/${bookId}/edits`), {
      method: "POST",
      body: JSON.stringify({ serial, op })
    });
  }
  bookEvents(bookId, handler) {
    return subscribeSse(this.url(`/books/${bookId}/events`), handler);
  }
  async renderHtml(bookId, locale) {
    const response = await fetch(
      this.url(`/books/${bookId}/render?locale=${locale}&format=html`)
    );
    if (!response.ok) throw new ApiError(response.status, "render failed");
    return response.text();
  }
  prove(objectId, direction = "both") {
    return request(this.url(`/prove/${objectId}`), {
      method: "POST",
      body: JSON.stringify({ direction })
    });
  }
  evaluateFigure(objectId, assignment) {
    return request(this.url(`/figure/${objectId}/evaluate`), {
      method: "POST",
      body: JSON.stringify(assignment ? { assignment } : {})
    });
  }
};

// src/figure.ts
var defaultScheduler = typeof requestAnimationFrame === "function" ? (callback) => requestAnimationFrame(() => callback()) : (callback) => setTimeout(callback, 16);
var FigureViewModel = class {
  constructor(client, objectId, scheduler = defaultScheduler) {
    this.client = client;
    this.objectId = objectId;
    this.scheduler = scheduler;
  }
  state = null;
  /** what the user is asking for; confirmed values live in state.free */
  freeInputs = {};
  evaluating = false;
  requestsIssued = 0;
  dirty = false;
  frameQueued = false;
  dragging = null;
  listeners = [];
  settle = [];
  onChange(listener) {
    this.listeners.push(listener);
  }
  notify() {
    for (const listener of this.listeners) listener(this);
  }
  async load() {
    this.state = await this.client.evaluateFigure(this.objectId);
    this.requestsIssued += 1;
    this.freeInputs = { ...this.state.free };
    this.notify();
  }
  /** Resolves when no evaluation is queued or in flight. */
  settled() {
    if (!this.dirty && !this.frameQueued && !this.evaluating) {
      return Promise.resolve();
    }
    return new Promise((resolve) => this.settle.push(resolve));
  }
  isFree(name) {
    return this.state !== null && name in this.state.free;
  }
  beginDrag(name) {
    if (!this.isFree(name)) return;
    this.dragging = name;
  }
  /** Pointer motion while dragging a free point (canvas coordinates). */
  dragTo(x, y) {
    if (!this.dragging || !this.state) return;
    const name = this.dragging;
    const current = this.state.free[name];
    if (Array.isArray(current)) {
      this.freeInputs[name] = [x, y];
    } else {
      const theta = this.angleFor(name, x, y);
      if (theta === null) return;
      this.freeInputs[name] = theta;
    }
    this.requestEvaluation();
  }
  endDrag() {
    this.dragging = null;
  }
  setFree(name, value) {
    this.freeInputs[name] = value;
    this.requestEvaluation();
  }
  angleFor(paramName, x, y) {
    const state = this.state;
    if (!state) return null;
    const step = state.steps.find((s) => s.params.includes(paramName));
    if (!step || step.op !== "point_on_circle") return null;
    const circle = state.coordinates[step.args[0]];
    if (!circle) return null;
    return Math.atan2(y - circle[1], x - circle[0]);
  }
  /** At most one in-flight evaluation per animation frame. */
  requestEvaluation() {
    this.dirty = true;
    if (this.frameQueued) return;
    this.frameQueued = true;
    this.scheduler(() => {
      this.frameQueued = false;
      void this.flush();
    });
  }
  async flush() {
    if (this.evaluating || !this.dirty) return;
    this.dirty = false;
    this.evaluating = true;
    try {
      this.state = await this.client.evaluateFigure(this.objectId, {
        ...this.freeInputs
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
  pointForParam(paramName) {
    const step = this.state?.steps.find((s) => s.params.includes(paramName));
    return step ? step.out : null;
  }
  draggableNames() {
    if (!this.state) return [];
    const names = [];
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
  handleFor(pointName) {
    if (!this.state) return null;
    if (Array.isArray(this.state.free[pointName])) return pointName;
    const step = this.state.steps.find((s) => s.out === pointName);
    if (step && step.params.length) return pointName;
    return null;
  }
  beginDragPoint(pointName) {
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
};

// src/tree.ts
function highlightsFromReport(report) {
  const map = /* @__PURE__ */ new Map();
  if (!report) return map;
  for (const violation of report.violations) {
    const positions = violation.positions ?? {};
    const id = violation.source && violation.source in positions ? violation.source : violation.target && violation.target in positions ? violation.target : null;
    if (!id) continue;
    const existing = map.get(id);
    if (existing) {
      existing.messages.push(violation.message);
      if (violation.severity === "error") existing.severity = "error";
    } else {
      map.set(id, {
        severity: violation.severity,
        messages: [violation.message]
      });
    }
  }
  return map;
}
function cloneTree(node) {
  return {
    kind: "category",
    id: node.id,
    title: node.title,
    children: node.children.map(
      (child) => child.kind === "category" ? cloneTree(child) : { ...child }
    )
  };
}
function nodeKey(node) {
  return node.id;
}
function findParent(root, nodeId) {
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
function findCategory(root, id) {
  if (root.id === id) return root;
  for (const child of root.children) {
    if (child.kind === "category") {
      const found = findCategory(child, id);
      if (found) return found;
    }
  }
  return null;
}
function applyOpLocally(root, op) {
  const tree = cloneTree(root);
  if (op.action === "insert") {
    const parent = findCategory(tree, op.parent);
    if (!parent) return tree;
    const node = op.leaf ? { kind: "leaf", id: op.leaf } : {
      kind: "category",
      id: op.categoryId ?? "",
      title: op.categoryTitle ?? "",
      children: []
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
var TreeViewModel = class _TreeViewModel {
  constructor(client, bookId, snapshot) {
    this.client = client;
    this.bookId = bookId;
    this.root = snapshot.book.root;
    this.title = snapshot.book.title;
    this.serial = snapshot.serial;
    this.acceptReport(snapshot.serial, snapshot.report);
  }
  root;
  title;
  /** serial of the last server-acknowledged edit */
  serial;
  /** highlights for exactly that serial */
  highlights = /* @__PURE__ */ new Map();
  report = null;
  pending = 0;
  // queued + in-flight edits
  queue = [];
  inFlight = false;
  listeners = [];
  drained = [];
  static async open(client, bookId) {
    return new _TreeViewModel(client, bookId, await client.getBook(bookId));
  }
  onChange(listener) {
    this.listeners.push(listener);
  }
  notify() {
    for (const listener of this.listeners) listener(this);
  }
  /** Resolves once every queued edit has been acknowledged. */
  settled() {
    if (!this.inFlight && this.queue.length === 0) return Promise.resolve();
    return new Promise((resolve) => this.drained.push(resolve));
  }
  acceptReport(serial, report) {
    if (serial < this.serial) return;
    this.serial = serial;
    this.report = report;
    this.highlights = highlightsFromReport(report);
    this.notify();
  }
  /** Optimistic apply + queued submission behind the current serial. */
  applyEdit(op) {
    this.root = applyOpLocally(this.root, op);
    this.queue.push(op);
    this.pending = this.queue.length + (this.inFlight ? 1 : 0);
    this.notify();
    void this.pump();
    return this.settled();
  }
  async pump() {
    if (this.inFlight) return;
    const op = this.queue.shift();
    if (!op) {
      for (const resolve of this.drained.splice(0)) resolve();
      return;
    }
    this.inFlight = true;
    this.pending = this.queue.length + 1;
    try {
      const ack = await this.client.postEdit(this.bookId, this.serial, op);
      this.acceptReport(ack.serial, ack.report);
    } catch (error) {
      if (error instanceof ConflictError) {
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
  leafIds() {
    const out = [];
    const walk = (node) => {
      for (const child of node.children) {
        if (child.kind === "category") walk(child);
        else out.push(child.id);
      }
    };
    walk(this.root);
    return out;
  }
  highlightFor(nodeId) {
    return this.highlights.get(nodeId);
  }
};

// src/app.ts
var App = class {
  constructor(options) {
    this.options = options;
    this.client = new GeobookClient(options.base);
    this.doc = options.document ?? document;
  }
  client;
  doc;
  rootElement;
  tree = null;
  figure = null;
  events = null;
  dragSource = null;
  canvasScale = { scale: 40, ox: 320, oy: 240 };
  // --- boot -----------------------------------------------------------
  async start(container) {
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
            <button id="add-object">New object\u2026</button>
            <button id="fetch-object">Fetch from base\u2026</button>
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
        const payload = event.data;
        this.tree?.acceptReport(payload.serial, payload.report);
      }
    });
    this.bindToolbar();
    this.renderTree();
    void this.renderPreview();
  }
  stop() {
    this.events?.close();
  }
  setStatus(text) {
    const el = this.doc.getElementById("status");
    if (el) el.textContent = text;
  }
  // --- tree -----------------------------------------------------------
  renderTree() {
    const host = this.doc.getElementById("tree");
    const tree = this.tree;
    if (!host || !tree) return;
    const title = this.doc.getElementById("book-title");
    if (title) title.textContent = tree.title;
    const serial = this.doc.getElementById("serial");
    if (serial) {
      serial.textContent = tree.pending ? `serial ${tree.serial} (+${tree.pending} pending)` : `serial ${tree.serial}`;
    }
    host.innerHTML = "";
    host.appendChild(this.categoryElement(tree.root, true));
    void this.renderPreview();
  }
  categoryElement(node, isRoot) {
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
        child.kind === "category" ? this.categoryElement(child, false) : this.leafElement(child)
      );
    }
    wrap.appendChild(list);
    return wrap;
  }
  leafElement(node) {
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
  decorateNode(el, nodeId, isCategory) {
    const highlight = this.tree?.highlightFor(nodeId);
    if (highlight) {
      el.classList.add(
        highlight.severity === "error" ? "violation-error" : "violation-warning"
      );
      el.title = highlight.messages.join("\n");
    }
    el.draggable = true;
    el.addEventListener("dragstart", (event) => {
      this.dragSource = nodeId;
      event.dataTransfer?.setData("text/plain", nodeId);
    });
    if (isCategory) this.attachContextMenu(el, nodeId);
  }
  allowDrop(list, parentId) {
    list.addEventListener("dragover", (event) => event.preventDefault());
    list.addEventListener("drop", (event) => {
      event.preventDefault();
      const nodeId = event.dataTransfer?.getData("text/plain") || this.dragSource;
      if (!nodeId || !this.tree) return;
      const index = list.querySelectorAll(":scope > .leaf, :scope > .category").length;
      void this.moveNode(nodeId, parentId, index);
    });
  }
  /** The single edit entry point the e2e tests drive. */
  moveNode(nodeId, newParent, index) {
    if (!this.tree) return Promise.resolve();
    return this.tree.applyEdit({ action: "move", nodeId, newParent, index });
  }
  insertLeaf(objectId, parent, index) {
    if (!this.tree) return Promise.resolve();
    return this.tree.applyEdit({ action: "insert", parent, index, leaf: objectId });
  }
  removeNode(nodeId) {
    if (!this.tree) return Promise.resolve();
    return this.tree.applyEdit({ action: "remove", nodeId });
  }
  attachContextMenu(el, categoryId) {
    el.addEventListener("contextmenu", (event) => {
      event.preventDefault();
      const title = this.promptDialog(`Rename ${categoryId}`);
      if (title && this.tree) {
        void this.tree.applyEdit({ action: "rename", nodeId: categoryId, title });
      }
    });
  }
  promptDialog(label) {
    const win = this.doc.defaultView;
    return win?.prompt ? win.prompt(label) : null;
  }
  // --- object detail, dialogs -------------------------------------------
  async showObject(objectId) {
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
    const prove = this.doc.getElementById("prove");
    const fig = this.doc.getElementById("show-figure");
    const disc = this.doc.getElementById("discover");
    for (const button of [prove, fig, disc]) {
      if (button) {
        button.disabled = !obj.formal;
        button.dataset.target = obj.id;
      }
    }
  }
  bindToolbar() {
    this.doc.getElementById("prove")?.addEventListener("click", (event) => {
      const id = event.currentTarget.dataset.target;
      if (id) void this.runProver(id);
    });
    this.doc.getElementById("show-figure")?.addEventListener("click", (event) => {
      const id = event.currentTarget.dataset.target;
      if (id) void this.openFigure(id);
    });
    this.doc.getElementById("discover")?.addEventListener("click", (event) => {
      const id = event.currentTarget.dataset.target;
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
  async runProver(objectId) {
    const out = this.doc.getElementById("prover-output");
    if (!out) return;
    out.textContent = "proving\u2026";
    const result = await this.client.prove(objectId);
    out.innerHTML = "";
    const status = this.doc.createElement("div");
    status.className = `prove-status prove-${result.status}`;
    status.textContent = result.status;
    out.appendChild(status);
    for (const [direction, detail] of Object.entries(result.directions)) {
      const block = this.doc.createElement("div");
      block.className = "prove-direction";
      const lines = detail.nondegeneracy.map((c) => `${c} \u2260 0`).join("; ");
      block.textContent = `${direction}: ${detail.status}${lines ? ` (requires ${lines})` : ""}`;
      out.appendChild(block);
    }
  }
  async runDiscovery(objectId) {
    const result = await this.client.discover(objectId);
    const accepted = await this.client.acceptCandidates(result.candidates);
    this.setStatus(
      `discovered ${result.candidates.length} relation(s), stored ${accepted.added}`
    );
  }
  async renderPreview() {
    const host = this.doc.getElementById("preview");
    const locale = this.doc.getElementById("locale")?.value ?? "en";
    if (!host || !this.tree) return;
    try {
      const page = await this.client.renderHtml(this.tree.bookId, locale);
      const body = page.match(/<body>([\s\S]*)<\/body>/)?.[1] ?? page;
      host.innerHTML = body;
    } catch {
      host.textContent = "(preview unavailable)";
    }
  }
  async newObjectDialog() {
    const name = this.promptDialog("Object name");
    if (!name || !this.tree) return;
    const created = await this.client.createObject({
      kind: "Remark",
      name,
      keywords: [],
      natural: { en: name }
    });
    await this.insertLeaf(created.id, this.tree.root.id, this.tree.root.children.length);
  }
  async fetchObjectDialog() {
    const words = this.promptDialog("Keywords (comma-separated)");
    if (!words || !this.tree) return;
    const found = await this.client.listObjects(words.split(","));
    const first = found.objects[0];
    if (first) {
      await this.insertLeaf(first.id, this.tree.root.id, this.tree.root.children.length);
    } else {
      this.setStatus("no objects matched");
    }
  }
  // --- figure ------------------------------------------------------------
  async openFigure(objectId) {
    const wrap = this.doc.getElementById("figure-wrap");
    if (wrap) wrap.hidden = false;
    this.figure = new FigureViewModel(this.client, objectId);
    this.figure.onChange(() => this.renderFigure());
    await this.figure.load();
    this.bindFigurePointer();
    this.renderFigure();
  }
  toCanvas(x, y) {
    const { scale, ox, oy } = this.canvasScale;
    return [ox + x * scale, oy - y * scale];
  }
  fromCanvas(px, py) {
    const { scale, ox, oy } = this.canvasScale;
    return [(px - ox) / scale, (oy - py) / scale];
  }
  renderFigure() {
    const svg = this.doc.getElementById("figure");
    const readout = this.doc.getElementById("figure-readout");
    const model = this.figure;
    if (!svg || !model?.state) return;
    const state = model.state;
    const parts = [];
    for (const [name, coords] of Object.entries(state.coordinates)) {
      const kind = state.kinds[name] ?? "";
      if (kind === "line" || kind === "perp_bisector" || kind === "perp_line" || kind === "parallel_line") {
        parts.push(this.lineSvg(name, coords));
      } else if (kind === "circumcircle" || kind === "circle") {
        const [cx, cy, r2] = coords;
        const [px, py] = this.toCanvas(cx, cy);
        const radius = Math.sqrt(Math.max(r2, 0)) * this.canvasScale.scale;
        parts.push(
          `<circle class="circle" data-name="${name}" cx="${px}" cy="${py}" r="${radius}" fill="none"/>`
        );
      }
    }
    for (const [name, coords] of Object.entries(state.coordinates)) {
      const kind = state.kinds[name] ?? "";
      if (kind === "line" || kind === "perp_bisector" || kind === "perp_line" || kind === "parallel_line" || kind === "circumcircle" || kind === "circle") {
        continue;
      }
      const [px, py] = this.toCanvas(coords[0], coords[1]);
      const draggable = model.handleFor(name) !== null;
      parts.push(
        `<circle class="point${draggable ? " draggable" : ""}" data-name="${name}" cx="${px}" cy="${py}" r="${draggable ? 7 : 4}"/><text data-label="${name}" x="${px + 8}" y="${py - 8}">${name.replace(/^_/, "")}</text>`
      );
    }
    svg.innerHTML = parts.join("");
    if (readout) {
      const residual = state.conclusionResidual;
      readout.innerHTML = `<span id="residual" data-value="${residual}">conclusion residual: ${residual.toExponential(2)}</span>` + (state.degenerate ? ' <span id="degenerate" class="badge">degenerate</span>' : "");
    }
  }
  lineSvg(name, coords) {
    const [a, b, c] = coords;
    const box = 20;
    const points = [];
    if (Math.abs(b) > 1e-12) {
      for (const x of [-box, box]) points.push([x, (-c - a * x) / b]);
    } else if (Math.abs(a) > 1e-12) {
      for (const y of [-box, box]) points.push([(-c - b * y) / a, y]);
    }
    if (points.length < 2) return "";
    const [p1, p2] = points.map(([x, y]) => this.toCanvas(x, y));
    return `<line class="line" data-name="${name}" x1="${p1[0]}" y1="${p1[1]}" x2="${p2[0]}" y2="${p2[1]}"/>`;
  }
  bindFigurePointer() {
    const svg = this.doc.getElementById("figure");
    if (!svg) return;
    svg.addEventListener("pointerdown", (event) => {
      const target = event.target;
      const name = target?.dataset?.name;
      if (name && this.figure?.handleFor(name)) {
        this.figure.beginDragPoint(name);
      }
    });
    svg.addEventListener("pointermove", (event) => {
      const pointer = event;
      const [x, y] = this.fromCanvas(pointer.offsetX ?? 0, pointer.offsetY ?? 0);
      this.figure?.dragTo(x, y);
    });
    svg.addEventListener("pointerup", () => this.figure?.endDrag());
  }
};
async function boot(options) {
  const app = new App(options);
  const doc = options.document ?? document;
  const container = doc.getElementById("app");
  if (!container) throw new Error("missing #app container");
  await app.start(container);
  return app;
}

// src/main.ts
var params = new URLSearchParams(window.location.search);
var base = params.get("api") ?? "http://127.0.0.1:8765";
boot({ base, bookId: params.get("book") ?? void 0 }).catch((error) => {
  const el = document.getElementById("app");
  if (el) el.textContent = `failed to start: ${error}`;
});
