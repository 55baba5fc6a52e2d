/**
 * Suggestion panel rendering. The four categories and their order are
 * fixed by the service; the panel always shows all four headers, with an
 * empty list when a category has no bullets.
 */

import type { SuggestionSetDoc } from './api.js';

export type CategoryKey = 'maintain' | 'reduce_avoid' | 'positive_cues' | 'adjustments';

export const SUGGESTION_CATEGORIES: ReadonlyArray<{ key: CategoryKey; title: string }> = [
  { key: 'maintain', title: 'Essential Behaviors to Maintain' },
  { key: 'reduce_avoid', title: 'Behaviors to Reduce or Avoid' },
  { key: 'positive_cues', title: 'Positive Engagement Cues' },
  { key: 'adjustments', title: 'Recommended Adjustments' },
];

export interface SuggestionHandlers {
  onEditBullet?: (key: CategoryKey, index: number, current: string) => void;
  onRemoveBullet?: (key: CategoryKey, index: number) => void;
}

export function renderSuggestionsPanel(
  doc: SuggestionSetDoc | null,
  handlers: SuggestionHandlers = {},
): HTMLElement {
  const panel = document.createElement('section');
  panel.className = 'suggestions-panel';

  const heading = document.createElement('h2');
  heading.textContent = 'Suggested Improvements';
  panel.appendChild(heading);

  if (doc?.designer_edited) {
    const badge = document.createElement('span');
    badge.className = 'badge badge-edited';
    badge.textContent = 'edited';
    heading.appendChild(badge);
  }
  if (doc?.truncated) {
    const badge = document.createElement('span');
    badge.className = 'badge badge-truncated';
    badge.textContent = 'truncated';
    heading.appendChild(badge);
  }

  for (const category of SUGGESTION_CATEGORIES) {
    const section = document.createElement('div');
    section.className = 'suggestion-category';
    section.dataset.category = category.key;

    const title = document.createElement('h3');
    title.textContent = category.title;
    section.appendChild(title);

    const list = document.createElement('ul');
    const bullets = doc ? doc[category.key] : [];
    bullets.forEach((bullet, index) => {
      const item = document.createElement('li');
      const text = document.createElement('span');
      text.textContent = bullet;
      item.appendChild(text);

      if (handlers.onEditBullet) {
        const edit = document.createElement('button');
        edit.type = 'button';
        edit.textContent = 'edit';
        edit.addEventListener('click', () => handlers.onEditBullet?.(category.key, index, bullet));
        item.appendChild(edit);
      }
      if (handlers.onRemoveBullet) {
        const remove = document.createElement('button');
        remove.type = 'button';
        remove.textContent = 'remove';
        remove.addEventListener('click', () => handlers.onRemoveBullet?.(category.key, index));
        item.appendChild(remove);
      }
      list.appendChild(item);
    });
    section.appendChild(list);
    panel.appendChild(section);
  }
  return panel;
}
