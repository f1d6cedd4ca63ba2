import { ApiClient } from "./api.js";
import { El, el, toDom } from "./descriptor.js";
import { renderErrorBanner, renderGraphView } from "./graphView.js";
import { renderMatrixView } from "./matrixView.js";
import { renderQuadrantView } from "./quadrantView.js";
import { ViewState, initialState } from "./state.js";
import { renderWhatIfPanel } from "./whatifPanel.js";
import { GraphDoc } from "./types.js";

/**
 * Single-page composition root. One immutable snapshot drives all three
 * views; the refresh button refetches it, everything else is local state.
 */
export class ExplorerApp {
  private snapshot: GraphDoc | null = null;
  private state: ViewState = initialState();

  constructor(private readonly client: ApiClient) {}

  async refresh(): Promise<void> {
    this.snapshot = await this.client.graph();
  }

  setState(update: Partial<ViewState>): void {
    this.state = { ...this.state, ...update };
  }

  async render(): Promise<El> {
    if (this.snapshot === null) {
      try {
        await this.refresh();
      } catch (err) {
        const message = err instanceof Error ? err.message : String(err);
        return renderErrorBanner(`service unreachable: ${message}`);
      }
    }
    const snapshot = this.snapshot!;
    const active =
      this.state.layout === "matrix"
        ? renderMatrixView(snapshot)
        : this.state.layout === "quadrant"
          ? renderQuadrantView(snapshot, this.state)
          : renderGraphView(snapshot, this.state);
    const whatif = await renderWhatIfPanel(this.client, this.state.whatifParams);
    return el("main", { class: "explorer" }, [
      el("button", { class: "refresh" }, [], "refresh"),
      active,
      whatif,
    ]);
  }

  /** Browser entry point; tests work on the descriptor tree instead. */
  async mount(container: Element): Promise<void> {
    const tree = await this.render();
    container.replaceChildren(toDom(tree, container.ownerDocument));
  }
}
