import { ApiClient, type Suggestion } from "./api";
import { Debouncer, SequenceGate } from "./debounce";
import { renderError, renderRelated, renderResults, renderSuggestions } from "./render";

export interface AppOptions {
  languages?: string[];
  debounceMs?: number;
  suggestLimit?: number;
  relatedLimit?: number;
}

interface UiSearchState {
  query: string;
  selectedEntity: string | null;
  language: string;
  page: number;
  timepoint: string | null;
}

const MAX_PAGE = 5;

/**
 * The whole interaction loop: typeahead commits an entity, search renders
 * blue/green linked results, the related panel feeds new searches, and the
 * language toggle re-routes through the inter-language mapping.
 */
export class SearchApp {
  readonly state: UiSearchState;
  private readonly api: ApiClient;
  private readonly debouncer: Debouncer;
  private readonly suggestGate = new SequenceGate();
  private suggestions: Suggestion[] = [];
  private activeSuggestion = -1;

  private readonly input: HTMLInputElement;
  private readonly dropdown: HTMLUListElement;
  private readonly languageSelect: HTMLSelectElement;
  private readonly timepointInput: HTMLInputElement;
  private readonly notice: HTMLElement;
  private readonly resultsPane: HTMLElement;
  private readonly relatedPanel: HTMLElement;
  private readonly pager: HTMLElement;

  constructor(root: HTMLElement, api: ApiClient, options: AppOptions = {}) {
    this.api = api;
    const languages = options.languages ?? ["en", "de"];
    this.state = {
      query: "",
      selectedEntity: null,
      language: languages[0] ?? "en",
      page: 1,
      timepoint: null,
    };
    this.debouncer = new Debouncer(options.debounceMs ?? 150);
    this.suggestLimit = options.suggestLimit ?? 10;
    this.relatedLimit = options.relatedLimit ?? 8;

    root.innerHTML = `
      <header class="toolbar">
        <div class="searchbox">
          <input id="query" type="text" autocomplete="off"
                 placeholder="Search an entity..." />
          <ul id="suggestions" hidden></ul>
        </div>
        <select id="language"></select>
        <label class="timepoint-label">around
          <input id="timepoint" type="month" />
        </label>
      </header>
      <p id="notice" hidden></p>
      <main class="content">
        <section id="results"></section>
        <nav id="pager" hidden>
          <button id="prev-page" type="button">previous</button>
          <span id="page-label"></span>
          <button id="next-page" type="button">next</button>
        </nav>
        <aside id="related" hidden></aside>
      </main>
    `;
    this.input = root.querySelector("#query") as HTMLInputElement;
    this.dropdown = root.querySelector("#suggestions") as HTMLUListElement;
    this.languageSelect = root.querySelector("#language") as HTMLSelectElement;
    this.timepointInput = root.querySelector("#timepoint") as HTMLInputElement;
    this.notice = root.querySelector("#notice") as HTMLElement;
    this.resultsPane = root.querySelector("#results") as HTMLElement;
    this.relatedPanel = root.querySelector("#related") as HTMLElement;
    this.pager = root.querySelector("#pager") as HTMLElement;

    for (const language of languages) {
      const option = document.createElement("option");
      option.value = language;
      option.textContent = language;
      this.languageSelect.appendChild(option);
    }
    this.languageSelect.value = this.state.language;

    this.input.addEventListener("input", () => this.onQueryInput());
    this.input.addEventListener("keydown", (event) => this.onQueryKeydown(event));
    this.languageSelect.addEventListener("change", () => {
      void this.onLanguageToggle(this.languageSelect.value);
    });
    this.timepointInput.addEventListener("change", () => this.onTimepointChange());
    (root.querySelector("#prev-page") as HTMLButtonElement).addEventListener("click", () =>
      this.goToPage(this.state.page - 1),
    );
    (root.querySelector("#next-page") as HTMLButtonElement).addEventListener("click", () =>
      this.goToPage(this.state.page + 1),
    );
  }

  private readonly suggestLimit: number;
  private readonly relatedLimit: number;

  private onQueryInput(): void {
    this.state.query = this.input.value;
    this.hideNotice();
    if (this.state.query.trim() === "") {
      this.debouncer.cancel();
      this.clearSuggestions();
      return;
    }
    this.debouncer.schedule(() => {
      void this.fetchSuggestions(this.state.query);
    });
  }

  private async fetchSuggestions(query: string): Promise<void> {
    const sequence = this.suggestGate.next();
    try {
      const response = await this.api.suggest(
        query,
        this.state.language,
        this.suggestLimit,
      );
      if (!this.suggestGate.admit(sequence)) {
        return; // a newer request already rendered
      }
      this.suggestions = response.suggestions;
      this.activeSuggestion = -1;
      renderSuggestions(this.dropdown, this.suggestions, this.activeSuggestion, (title) => {
        void this.commitEntity(title);
      });
    } catch (error) {
      if (this.suggestGate.admit(sequence)) {
        this.showNotice("suggestions unavailable right now");
      }
    }
  }

  private onQueryKeydown(event: KeyboardEvent): void {
    if (this.dropdown.hidden) {
      if (event.key === "Enter" && this.state.query.trim() !== "") {
        void this.commitEntity(this.state.query.trim());
      }
      return;
    }
    if (event.key === "ArrowDown" || event.key === "ArrowUp") {
      event.preventDefault();
      const step = event.key === "ArrowDown" ? 1 : -1;
      const count = this.suggestions.length;
      this.activeSuggestion = (this.activeSuggestion + step + count) % count;
      renderSuggestions(this.dropdown, this.suggestions, this.activeSuggestion, (title) => {
        void this.commitEntity(title);
      });
    } else if (event.key === "Enter") {
      const chosen =
        this.suggestions[this.activeSuggestion >= 0 ? this.activeSuggestion : 0];
      if (chosen) {
        void this.commitEntity(chosen.title);
      }
    } else if (event.key === "Escape") {
      this.clearSuggestions();
    }
  }

  private clearSuggestions(): void {
    this.suggestions = [];
    this.activeSuggestion = -1;
    this.dropdown.textContent = "";
    this.dropdown.hidden = true;
  }

  async commitEntity(title: string): Promise<void> {
    this.state.selectedEntity = title;
    this.state.page = 1;
    this.input.value = title;
    this.state.query = title;
    this.clearSuggestions();
    await this.runSearch();
  }

  private async runSearch(): Promise<void> {
    const entity = this.state.selectedEntity;
    if (!entity) return;
    try {
      const response = await this.api.search(
        entity,
        this.state.language,
        this.state.page,
        this.state.timepoint ?? undefined,
      );
      renderResults(this.resultsPane, response);
      this.updatePager();
    } catch (error) {
      renderError(this.resultsPane, "search failed; please try again");
      this.pager.hidden = true;
      return;
    }
    try {
      const related = await this.api.related(entity, this.state.language, this.relatedLimit);
      renderRelated(this.relatedPanel, related.related, (title) => {
        void this.commitEntity(title);
      });
    } catch (error) {
      // an entity without graph presence simply has no related panel
      renderRelated(this.relatedPanel, [], () => {});
    }
  }

  private updatePager(): void {
    this.pager.hidden = false;
    const label = this.pager.querySelector("#page-label") as HTMLElement;
    label.textContent = `page ${this.state.page}`;
    (this.pager.querySelector("#prev-page") as HTMLButtonElement).disabled =
      this.state.page <= 1;
    (this.pager.querySelector("#next-page") as HTMLButtonElement).disabled =
      this.state.page >= MAX_PAGE;
  }

  private goToPage(page: number): void {
    if (page < 1 || page > MAX_PAGE || !this.state.selectedEntity) return;
    this.state.page = page;
    void this.runSearch();
  }

  async onLanguageToggle(toLanguage: string): Promise<void> {
    const fromLanguage = this.state.language;
    if (toLanguage === fromLanguage) return;
    const entity = this.state.selectedEntity;
    if (!entity) {
      this.state.language = toLanguage;
      return;
    }
    try {
      const mapping = await this.api.interlanguage(entity, fromLanguage, toLanguage);
      if (mapping.mapped_title) {
        this.state.language = toLanguage;
        await this.commitEntity(mapping.mapped_title);
      } else {
        this.languageSelect.value = fromLanguage;
        this.showNotice(`no ${toLanguage} page is mapped for "${entity}"`);
      }
    } catch (error) {
      this.languageSelect.value = fromLanguage;
      this.showNotice("language switch failed");
    }
  }

  private onTimepointChange(): void {
    const value = this.timepointInput.value; // YYYY-MM or empty
    this.state.timepoint = value ? `${value}-01T00:00:00+00:00` : null;
    if (this.state.selectedEntity) {
      void this.runSearch();
    }
  }

  private showNotice(message: string): void {
    this.notice.textContent = message;
    this.notice.hidden = false;
  }

  private hideNotice(): void {
    this.notice.hidden = true;
  }
}
