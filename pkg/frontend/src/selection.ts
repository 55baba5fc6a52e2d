/**
 * Maps text selections over the rendered transcript onto annotation
 * spans. A selection is captured in UTF-16 code units (what DOM ranges
 * report) and leaves this module in scalar offsets, split per utterance:
 * the server only accepts single-utterance spans, so a drag across
 * utterance boundaries becomes one span per touched utterance.
 */

import { sliceScalars, unitToScalar } from './offsets.js';

export interface UtteranceRef {
  index: number;
  text: string;
}

/** A raw selection over the transcript, in code units per utterance. */
export interface TextSelection {
  startUtterance: number;
  startUnit: number;
  endUtterance: number;
  endUnit: number;
}

/** One server-ready span plus the exact text it covers. */
export interface SpanDraft {
  utteranceIndex: number;
  start: number;
  end: number;
  text: string;
}

/**
 * Split a selection into per-utterance scalar spans.
 *
 * `utterances` is the ordered list of rendered utterances; selection
 * endpoints index into it by position, not by utterance number, so
 * filtered transcript views keep working. Empty fragments (a drag that
 * ends exactly at an utterance start) are dropped.
 */
export function bindSelection(
  utterances: UtteranceRef[],
  selection: TextSelection,
): SpanDraft[] {
  let { startUtterance, startUnit, endUtterance, endUnit } = selection;
  if (
    startUtterance > endUtterance ||
    (startUtterance === endUtterance && startUnit > endUnit)
  ) {
    [startUtterance, endUtterance] = [endUtterance, startUtterance];
    [startUnit, endUnit] = [endUnit, startUnit];
  }
  if (startUtterance < 0 || endUtterance >= utterances.length) {
    throw new RangeError('selection endpoints outside the rendered transcript');
  }

  const drafts: SpanDraft[] = [];
  for (let pos = startUtterance; pos <= endUtterance; pos += 1) {
    const utterance = utterances[pos];
    const fromUnit = pos === startUtterance ? startUnit : 0;
    const toUnit = pos === endUtterance ? endUnit : utterance.text.length;
    const start = unitToScalar(utterance.text, Math.min(fromUnit, utterance.text.length));
    const end = unitToScalar(utterance.text, Math.min(toUnit, utterance.text.length));
    if (start === end) {
      continue;
    }
    drafts.push({
      utteranceIndex: utterance.index,
      start,
      end,
      text: sliceScalars(utterance.text, start, end),
    });
  }
  return drafts;
}

/**
 * Code unit offset of (node, offsetInNode) within the concatenated text
 * content of `container`. Highlight rendering splits utterance text into
 * many nodes, so the walk has to cross element boundaries.
 */
export function textOffsetWithin(container: Node, node: Node, offsetInNode: number): number {
  if (node.nodeType !== Node.TEXT_NODE) {
    // Element endpoint: offset counts child nodes; resolve to the text
    // length of the children before it.
    let units = 0;
    for (let i = 0; i < offsetInNode; i += 1) {
      units += (node.childNodes[i].textContent ?? '').length;
    }
    return textOffsetBefore(container, node) + units;
  }
  return textOffsetBefore(container, node) + offsetInNode;
}

function textOffsetBefore(container: Node, target: Node): number {
  let units = 0;
  let found = false;
  const walk = (current: Node): void => {
    if (found || current === target) {
      found = true;
      return;
    }
    if (current.nodeType === Node.TEXT_NODE) {
      units += (current.textContent ?? '').length;
      return;
    }
    for (const child of Array.from(current.childNodes)) {
      walk(child);
      if (found) {
        return;
      }
    }
  };
  walk(container);
  if (!found && container !== target) {
    throw new Error('selection endpoint is not inside the utterance');
  }
  return units;
}

/**
 * Capture a DOM selection over utterance elements as a TextSelection.
 * Utterance elements are matched by their `data-utterance` attribute and
 * must appear in transcript order inside `root`.
 */
export function captureDomSelection(
  root: ParentNode,
  domSelection: { anchorNode: Node | null; anchorOffset: number; focusNode: Node | null; focusOffset: number; isCollapsed: boolean },
): TextSelection | null {
  if (domSelection.isCollapsed || !domSelection.anchorNode || !domSelection.focusNode) {
    return null;
  }
  const holders = Array.from(root.querySelectorAll<HTMLElement>('[data-utterance]'));
  const locate = (node: Node, offset: number): { position: number; unit: number } | null => {
    for (let position = 0; position < holders.length; position += 1) {
      const holder = holders[position];
      if (holder === node || holder.contains(node)) {
        return { position, unit: textOffsetWithin(holder, node, offset) };
      }
    }
    return null;
  };
  const anchor = locate(domSelection.anchorNode, domSelection.anchorOffset);
  const focus = locate(domSelection.focusNode, domSelection.focusOffset);
  if (!anchor || !focus) {
    return null;
  }
  return {
    startUtterance: anchor.position,
    startUnit: anchor.unit,
    endUtterance: focus.position,
    endUnit: focus.unit,
  };
}
