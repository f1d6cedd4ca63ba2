/**
 * Minimal renderable element tree. Views build these pure descriptors;
 * the browser entry point materializes them into DOM nodes, and the
 * contract tests inspect them directly without a DOM.
 */

export interface El {
  tag: string;
  attrs: Record<string, string>;
  children: El[];
  text?: string;
}

export function el(
  tag: string,
  attrs: Record<string, string> = {},
  children: El[] = [],
  text?: string
): El {
  return { tag, attrs, children, text };
}

export function findAll(root: El, pred: (node: El) => boolean): El[] {
  const out: El[] = [];
  const walk = (node: El) => {
    if (pred(node)) out.push(node);
    node.children.forEach(walk);
  };
  walk(root);
  return out;
}

export function byClass(root: El, cls: string): El[] {
  return findAll(root, (n) => (n.attrs.class ?? "").split(" ").includes(cls));
}

export function visible(node: El): boolean {
  return node.attrs.hidden !== "true";
}

/** Materialize a descriptor tree; only used by the browser entry point. */
export function toDom(node: El, doc: Document): Element {
  const element = doc.createElement(node.tag);
  for (const [k, v] of Object.entries(node.attrs)) {
    element.setAttribute(k, v);
  }
  if (node.text !== undefined) {
    element.textContent = node.text;
  }
  for (const child of node.children) {
    element.appendChild(toDom(child, doc));
  }
  return element;
}
