/**
 * Presentation data for the annotation tag picker. The taxonomy itself
 * lives on the server, which validates every submitted tag; this module
 * only mirrors the names so the picker can render before any annotation
 * exists.
 */

export const TAGS = [
  'liked',
  'disliked',
  'necessary',
  'unnecessary',
  'clear',
  'ambiguous',
  'informative',
  'redundant',
  'concise',
  'wordy',
  'on_topic',
  'off_topic',
  'helpful',
  'confusing',
] as const;

export type Tag = (typeof TAGS)[number];

/**
 * Antonym pairs, one picker row each, so a designer sees both poles of an
 * axis side by side before tagging.
 */
export const ANTONYM_ROWS: ReadonlyArray<readonly [Tag, Tag]> = [
  ['liked', 'disliked'],
  ['necessary', 'unnecessary'],
  ['clear', 'ambiguous'],
  ['informative', 'redundant'],
  ['concise', 'wordy'],
  ['on_topic', 'off_topic'],
  ['helpful', 'confusing'],
];

/**
 * Highlight palette. Positive pole of each axis gets the cooler colour,
 * negative pole the warmer one, so contradictory overlaps stand out.
 */
export const TAG_COLORS: Record<Tag, string> = {
  liked: '#b7e4c7',
  disliked: '#f8c8c8',
  necessary: '#a8dadc',
  unnecessary: '#f4b8a0',
  clear: '#bde0fe',
  ambiguous: '#f6d186',
  informative: '#c5e8b7',
  redundant: '#f2b5d4',
  concise: '#9ad1d4',
  wordy: '#f9c687',
  on_topic: '#c8d8f7',
  off_topic: '#f5a89a',
  helpful: '#b5e2cf',
  confusing: '#eeb0c2',
};

export function tagLabel(tag: Tag): string {
  return tag.replace('_', ' ');
}
