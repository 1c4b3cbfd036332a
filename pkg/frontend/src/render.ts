import type { LinkedResultRow, RelatedEntity, SearchResponse, Suggestion } from "./api";

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

function spanYears(row: LinkedResultRow): string {
  const first = row.first_capture ? row.first_capture.slice(0, 4) : "";
  const last = row.last_capture ? row.last_capture.slice(0, 4) : "";
  return `${first} – ${last}`;
}

export function renderSuggestions(
  list: HTMLUListElement,
  suggestions: Suggestion[],
  activeIndex: number,
  onSelect: (title: string) => void,
): void {
  list.textContent = "";
  suggestions.forEach((suggestion, index) => {
    const item = el("li", index === activeIndex ? "suggestion active" : "suggestion");
    item.textContent = suggestion.title;
    item.dataset.entityId = suggestion.entity_id;
    item.addEventListener("mousedown", (event) => {
      event.preventDefault(); // keep focus in the input
      onSelect(suggestion.title);
    });
    list.appendChild(item);
  });
  list.hidden = suggestions.length === 0;
}

/** One result row: title, snippet, blue live link, green archive link. */
function renderResultRow(row: LinkedResultRow): HTMLElement {
  const item = el("div", "result");
  const heading = el("h3");
  const live = el("a", "live-link", row.title || row.live_link);
  live.href = row.live_link;
  heading.appendChild(live);
  item.appendChild(heading);
  item.appendChild(el("p", "snippet", row.snippet));
  const links = el("div", "links");
  const url = el("span", "url", row.live_link);
  links.appendChild(url);
  if (row.archive_link) {
    const green = el("a", "green-link", "archived versions");
    green.href = row.archive_link;
    links.appendChild(green);
    links.appendChild(el("span", "span-dates", spanYears(row)));
  } else if (row.lookup_failed) {
    links.appendChild(el("span", "archive-unknown", "archive status unknown"));
  }
  item.appendChild(links);
  return item;
}

export function renderResults(container: HTMLElement, response: SearchResponse): void {
  container.textContent = "";
  if (!Array.isArray(response.results)) {
    throw new TypeError("malformed search response: results is not a list");
  }
  if (response.results.length === 0) {
    container.appendChild(el("p", "empty-state", "No results for this page."));
    return;
  }
  if (response.retrieved_at) {
    container.appendChild(
      el("p", "retrieved-at", `results retrieved ${response.retrieved_at}`),
    );
  }
  for (const row of response.results) {
    container.appendChild(renderResultRow(row));
  }
}

export function renderRelated(
  panel: HTMLElement,
  related: RelatedEntity[],
  onSelect: (title: string) => void,
): void {
  panel.textContent = "";
  if (related.length === 0) {
    panel.hidden = true;
    return;
  }
  panel.hidden = false;
  panel.appendChild(el("h2", "related-heading", "Related entities"));
  const list = el("ul", "related-list");
  for (const entity of related) {
    const item = el("li", "related-item");
    const button = el("button", "related-entity", entity.title);
    button.type = "button";
    button.addEventListener("click", () => onSelect(entity.title));
    item.appendChild(button);
    list.appendChild(item);
  }
  panel.appendChild(list);
}

export function renderError(container: HTMLElement, message: string): void {
  container.textContent = "";
  container.appendChild(el("p", "error-panel", message));
}
