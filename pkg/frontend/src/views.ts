/** DOM rendering: Sentence View, Entity View, Word View, pair list, controls.
 *
 * The three views stay synchronized through a single ViewState: mention
 * highlights and entity buttons share the server-assigned color, one
 * button represents a whole cluster however many mentions it has, and
 * the word buttons drive drag-and-drop entity editing (drop on the view
 * background to create a cluster, drop on a button to extend one).
 */

import { OverlapError, ViewState } from "./state.js";
import { ENTITY_TYPES, EntityType } from "./types.js";

export interface ViewCallbacks {
  onSubmit(expresses: boolean): void;
  onDelete(): void;
  onIgnore(): void;
}

const FALLBACK_COLOR = "#999999";

/** Drag payload fallback for environments without a real DataTransfer. */
let draggedToken: number | null = null;

function tokenFromEvent(ev: DragEvent): number | null {
  const raw = ev.dataTransfer?.getData("text/token-index");
  if (raw) return Number(raw);
  return draggedToken;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderViews(
  root: HTMLElement,
  state: ViewState,
  callbacks: ViewCallbacks,
): void {
  root.textContent = "";
  root.append(
    renderHeader(state),
    renderSentenceView(state),
    renderEntityView(root, state, callbacks),
    renderWordView(state),
    renderPairList(root, state, callbacks),
    renderControls(root, state, callbacks),
    el("div", "error-banner"),
  );
}

function rerender(root: HTMLElement, state: ViewState, callbacks: ViewCallbacks): void {
  renderViews(root, state, callbacks);
}

function renderHeader(state: ViewState): HTMLElement {
  const header = el("div", "task-header");
  const rel = state.task.relation;
  header.append(
    el("span", "relation-name", rel.name),
    el("span", "relation-signature",
       ` ${rel.subject_type} ${rel.symmetric ? "↔" : "→"} ${rel.object_type}`),
    el("span", "round-badge", `round ${state.task.round}`),
  );
  return header;
}

function renderSentenceView(state: ViewState): HTMLElement {
  const view = el("div", "sentence-view");
  view.dataset.view = "sentence";
  state.task.tokens.forEach((text, i) => {
    const span = el("span", "token", text);
    span.dataset.tokenIndex = String(i);
    const owner = state.tokenOwner(i);
    if (owner) {
      span.classList.add("mention");
      span.dataset.entityRef = owner.entity_ref;
      span.style.backgroundColor = state.colorOf(owner.entity_ref) ?? FALLBACK_COLOR;
      span.title = owner.display_label;
    }
    view.append(span, document.createTextNode(" "));
  });
  return view;
}

function renderEntityView(
  root: HTMLElement,
  state: ViewState,
  callbacks: ViewCallbacks,
): HTMLElement {
  const view = el("div", "entity-view");
  view.dataset.view = "entity";
  for (const cluster of state.entities) {
    const button = el("button", "entity-button", cluster.display_label);
    button.dataset.entityRef = cluster.entity_ref;
    button.style.backgroundColor = state.colorOf(cluster.entity_ref) ?? FALLBACK_COLOR;
    const role = state.role(cluster.entity_ref);
    button.dataset.role = role;
    if (role !== "none") {
      button.append(el("span", "role-badge", role === "subject" ? "SUBJ" : "OBJ"));
    }
    button.addEventListener("click", () => {
      state.toggleRole(cluster.entity_ref);
      rerender(root, state, callbacks);
    });
    // dropping an adjacent word extends this cluster's nearest mention
    button.addEventListener("dragover", (ev) => ev.preventDefault());
    button.addEventListener("drop", (ev) => {
      ev.preventDefault();
      ev.stopPropagation();
      const index = tokenFromEvent(ev as DragEvent);
      if (index === null) return;
      try {
        state.extendCluster(cluster.entity_ref, index);
        rerender(root, state, callbacks);
      } catch (err) {
        if (err instanceof OverlapError) flashError(root, err.message);
        else throw err;
      }
    });
    view.append(button);
  }
  // dropping a word on the view background creates a new cluster
  view.addEventListener("dragover", (ev) => ev.preventDefault());
  view.addEventListener("drop", (ev) => {
    ev.preventDefault();
    const index = tokenFromEvent(ev as DragEvent);
    if (index === null) return;
    const picker = root.querySelector<HTMLSelectElement>(".type-picker");
    const entityType = (picker?.value ?? state.task.relation.subject_type) as EntityType;
    try {
      state.createClusterFromToken(index, entityType);
      rerender(root, state, callbacks);
    } catch (err) {
      if (err instanceof OverlapError) flashError(root, err.message);
      else throw err;
    }
  });
  return view;
}

function renderWordView(state: ViewState): HTMLElement {
  const view = el("div", "word-view");
  view.dataset.view = "word";
  state.task.tokens.forEach((text, i) => {
    const button = el("button", "word-button", text);
    button.dataset.tokenIndex = String(i);
    button.draggable = true;
    button.addEventListener("dragstart", (ev) => {
      draggedToken = i;
      (ev as DragEvent).dataTransfer?.setData("text/token-index", String(i));
    });
    button.addEventListener("dragend", () => {
      draggedToken = null;
    });
    view.append(button);
  });
  return view;
}

function renderPairList(
  root: HTMLElement,
  state: ViewState,
  callbacks: ViewCallbacks,
): HTMLElement {
  const wrap = el("div", "pair-list");
  for (const [s, o] of state.assertedPairs()) {
    const subj = state.cluster(s).display_label;
    const obj = state.cluster(o).display_label;
    wrap.append(el("span", "pair", `${subj} → ${obj}`));
  }
  const addGroup = el("button", "add-pair-group", "Add pair group");
  addGroup.addEventListener("click", () => {
    state.addPairGroup();
    rerender(root, state, callbacks);
  });
  wrap.append(addGroup);
  return wrap;
}

function renderControls(
  root: HTMLElement,
  state: ViewState,
  callbacks: ViewCallbacks,
): HTMLElement {
  const controls = el("div", "controls");

  const picker = el("select", "type-picker");
  for (const t of ENTITY_TYPES) {
    const option = el("option", undefined, t) as HTMLOptionElement;
    option.value = t;
    if (t === state.task.relation.subject_type) option.selected = true;
    picker.append(option);
  }

  const yes = el("button", "decide-yes", "Expresses");
  yes.disabled = !state.canSubmit(true);
  yes.addEventListener("click", () => callbacks.onSubmit(true));

  const no = el("button", "decide-no", "Does not express");
  no.addEventListener("click", () => callbacks.onSubmit(false));

  const del = el("button", "delete-sentence", "Delete sentence");
  del.addEventListener("click", () => callbacks.onDelete());

  const ignore = el("button", "ignore-sentence", "Ignore for this relation");
  ignore.addEventListener("click", () => callbacks.onIgnore());

  controls.append(picker, yes, no, del, ignore);
  return controls;
}

export function flashError(root: HTMLElement, message: string): void {
  const banner = root.querySelector<HTMLElement>(".error-banner");
  if (banner) banner.textContent = message;
}

export function renderDone(root: HTMLElement, relation: string): void {
  root.textContent = "";
  root.append(el("div", "queue-done", `No more sentences for ${relation}.`));
}
