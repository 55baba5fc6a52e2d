/**
 * Offset conversion between JavaScript string indices and the span
 * coordinates the server expects.
 *
 * DOM ranges report offsets in UTF-16 code units. The annotation API
 * counts Unicode scalar values, so any character outside the Basic
 * Multilingual Plane (emoji, many symbols) occupies two code units but
 * one scalar. Every span that leaves this client goes through
 * unitToScalar, and every stored span is rendered back through
 * scalarToUnit, so highlights and server-side slices always agree.
 */

const HIGH_SURROGATE_MIN = 0xd800;
const HIGH_SURROGATE_MAX = 0xdbff;
const LOW_SURROGATE_MIN = 0xdc00;
const LOW_SURROGATE_MAX = 0xdfff;

function isHighSurrogate(code: number): boolean {
  return code >= HIGH_SURROGATE_MIN && code <= HIGH_SURROGATE_MAX;
}

function isLowSurrogate(code: number): boolean {
  return code >= LOW_SURROGATE_MIN && code <= LOW_SURROGATE_MAX;
}

/** Number of Unicode scalar values in the string. */
export function scalarLength(text: string): number {
  let scalars = 0;
  for (let i = 0; i < text.length; i += 1) {
    if (isHighSurrogate(text.charCodeAt(i)) && isLowSurrogate(text.charCodeAt(i + 1))) {
      i += 1;
    }
    scalars += 1;
  }
  return scalars;
}

/**
 * Convert a UTF-16 code unit offset into a scalar offset.
 *
 * An offset that lands between the halves of a surrogate pair snaps back
 * to the start of that pair; browsers do not produce such selections, but
 * snapping keeps the function total.
 */
export function unitToScalar(text: string, unitIndex: number): number {
  if (unitIndex < 0 || unitIndex > text.length) {
    throw new RangeError(`unit offset ${unitIndex} outside [0, ${text.length}]`);
  }
  let scalars = 0;
  let i = 0;
  while (i < unitIndex) {
    if (isHighSurrogate(text.charCodeAt(i)) && isLowSurrogate(text.charCodeAt(i + 1))) {
      if (i + 1 === unitIndex) {
        return scalars; // mid-pair: snap to the pair start
      }
      i += 2;
    } else {
      i += 1;
    }
    scalars += 1;
  }
  return scalars;
}

/** Convert a scalar offset into a UTF-16 code unit offset. */
export function scalarToUnit(text: string, scalarIndex: number): number {
  if (scalarIndex < 0) {
    throw new RangeError(`scalar offset ${scalarIndex} is negative`);
  }
  let scalars = 0;
  let i = 0;
  while (i < text.length) {
    if (scalars === scalarIndex) {
      return i;
    }
    if (isHighSurrogate(text.charCodeAt(i)) && isLowSurrogate(text.charCodeAt(i + 1))) {
      i += 2;
    } else {
      i += 1;
    }
    scalars += 1;
  }
  if (scalars === scalarIndex) {
    return text.length;
  }
  throw new RangeError(`scalar offset ${scalarIndex} outside [0, ${scalars}]`);
}

/**
 * Slice by scalar offsets, matching how the server slices utterance text
 * when it validates and renders a span.
 */
export function sliceScalars(text: string, start: number, end: number): string {
  const from = scalarToUnit(text, start);
  const to = scalarToUnit(text, Math.max(start, end));
  return text.slice(from, to);
}
