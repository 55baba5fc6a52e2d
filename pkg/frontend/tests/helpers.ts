/** Deterministic PRNG so selection fuzzing is reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/**
 * Snap a unit offset off the middle of a surrogate pair, matching how
 * browsers position selection endpoints.
 */
export function snapToBoundary(text: string, unit: number): number {
  if (unit > 0 && unit < text.length) {
    const before = text.charCodeAt(unit - 1);
    const at = text.charCodeAt(unit);
    if (before >= 0xd800 && before <= 0xdbff && at >= 0xdc00 && at <= 0xdfff) {
      return unit - 1;
    }
  }
  return unit;
}

/**
 * Resolve a code unit offset within an utterance element to the concrete
 * text node and in-node offset a DOM selection would report. Highlight
 * marks split utterances into several text nodes, so walk them in order.
 */
export function locateUnitOffset(
  holder: HTMLElement,
  unit: number,
): { node: Node; offset: number } {
  const walker = document.createTreeWalker(holder, NodeFilter.SHOW_TEXT);
  let consumed = 0;
  let last: Node | null = null;
  while (walker.nextNode()) {
    const node = walker.currentNode;
    const length = (node.textContent ?? '').length;
    if (unit <= consumed + length) {
      return { node, offset: unit - consumed };
    }
    consumed += length;
    last = node;
  }
  if (last && unit === consumed) {
    return { node: last, offset: (last.textContent ?? '').length };
  }
  throw new Error(`unit offset ${unit} beyond utterance text (${consumed})`);
}
