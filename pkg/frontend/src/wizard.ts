/**
 * Guided discovery flow: pick a source term, screen the source diagram,
 * mark intermediates, attach an intermediate corpus, inspect ranked target
 * candidates.
 *
 * Every step issues the corresponding session request and re-renders from
 * the server's response; the wizard holds no derived numbers of its own.
 * A 422 from the server (for example, asking for targets before marking an
 * intermediate) is surfaced as step guidance instead of failing silently.
 */

import { ApiClient, ApiError } from "./api";
import { renderClusterPanel, PLACEHOLDER } from "./cluster_panel";
import { renderDiagram } from "./diagram_view";
import { SessionView, SuggestionRow, TargetRow } from "./schema";
import { locateTerm } from "./view_model";

export type WizardStep = "pick-source" | "screen" | "mark" | "attach" | "targets";

const STEPS: readonly WizardStep[] = ["pick-source", "screen", "mark", "attach", "targets"];

const STEP_TITLES: Record<WizardStep, string> = {
  "pick-source": "Pick source term",
  screen: "Screen source diagram",
  mark: "Mark intermediates",
  attach: "Attach intermediate corpus",
  targets: "View target candidates",
};

export interface WizardState {
  session: SessionView | null;
  step: WizardStep;
  selection: number | null;
  logScale: boolean;
  guidance: string | null;
  suggestions: SuggestionRow[] | null;
  targets: TargetRow[] | null;
}

export class DiscoveryWizard {
  readonly state: WizardState = {
    session: null,
    step: "pick-source",
    selection: null,
    logScale: false,
    guidance: null,
    suggestions: null,
    targets: null,
  };

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
  ) {
    this.render();
  }

  /** Open a session for `term` over an uploaded corpus; moves to screening. */
  async start(corpusId: string, term: string): Promise<void> {
    const session = await this.guarded(() => this.api.openSession(corpusId, term));
    if (session === null) {
      return;
    }
    this.state.session = session;
    this.state.step = "screen";
    this.state.selection = locateTerm(session.source.diagram, session.source.descriptor);
    this.render();
  }

  select(clusterId: number | null): void {
    this.state.selection = clusterId;
    this.render();
  }

  /** Focus the cluster marker containing `descriptor`. */
  locate(descriptor: string): void {
    const session = this.state.session;
    if (session !== null) {
      this.state.selection = locateTerm(session.source.diagram, descriptor);
      this.render();
    }
  }

  toggleScale(logScale: boolean): void {
    this.state.logScale = logScale;
    this.render();
  }

  /** Ask the server to rank candidate intermediate clusters (read-only). */
  async screen(): Promise<void> {
    const view = await this.guarded(() =>
      this.api.action(this.sessionId(), { action: "suggest" }),
    );
    if (view === null) {
      return;
    }
    this.state.session = view;
    this.state.suggestions = view.suggestions ?? [];
    this.state.step = "mark";
    this.render();
  }

  async mark(descriptor: string): Promise<void> {
    const view = await this.guarded(() =>
      this.api.action(this.sessionId(), { action: "mark", descriptor }),
    );
    if (view === null) {
      return;
    }
    this.state.session = view;
    this.state.step = "attach";
    this.render();
  }

  async attach(descriptor: string, corpusId: string): Promise<void> {
    const view = await this.guarded(() =>
      this.api.action(this.sessionId(), { action: "attach", descriptor, corpus_id: corpusId }),
    );
    if (view === null) {
      return;
    }
    this.state.session = view;
    this.state.step = "targets";
    this.render();
  }

  async targets(descriptor: string, strict = false): Promise<void> {
    const view = await this.guarded(() =>
      this.api.action(this.sessionId(), { action: "targets", descriptor, strict }),
    );
    if (view === null) {
      return;
    }
    this.state.session = view;
    this.state.targets = view.targets ?? view.target_candidates;
    this.state.step = "targets";
    this.render();
  }

  private sessionId(): string {
    const session = this.state.session;
    if (session === null) {
      throw new Error("no session open");
    }
    return session.session_id;
  }

  /** Run a server call; a 422 becomes step guidance and yields null. */
  private async guarded<T>(work: () => Promise<T>): Promise<T | null> {
    try {
      const result = await work();
      this.state.guidance = null;
      return result;
    } catch (error) {
      if (error instanceof ApiError && error.status === 422) {
        this.state.guidance = error.detail;
        this.render();
        return null;
      }
      throw error;
    }
  }

  render(): void {
    this.root.replaceChildren();
    const wizard = document.createElement("div");
    wizard.className = "discovery-wizard";

    const steps = document.createElement("ol");
    steps.className = "wizard-steps";
    for (const step of STEPS) {
      const item = document.createElement("li");
      item.dataset.step = step;
      item.textContent = STEP_TITLES[step];
      if (step === this.state.step) {
        item.className = "current";
      }
      steps.append(item);
    }
    wizard.append(steps);

    if (this.state.guidance !== null) {
      const guidance = document.createElement("div");
      guidance.className = "step-guidance";
      guidance.setAttribute("role", "alert");
      guidance.textContent = this.state.guidance;
      wizard.append(guidance);
    }

    const session = this.state.session;
    if (session !== null) {
      wizard.append(this.renderSource(session));
      wizard.append(this.renderIntermediates(session));
      if (this.state.suggestions !== null) {
        wizard.append(this.renderSuggestions(this.state.suggestions));
      }
      if (this.state.targets !== null) {
        wizard.append(this.renderTargets(this.state.targets));
      }
      wizard.append(this.renderAudit(session));
    }

    this.root.append(wizard);
  }

  private renderSource(session: SessionView): HTMLElement {
    const section = document.createElement("section");
    section.className = "wizard-source";

    const line = document.createElement("div");
    line.className = "source-line";
    line.textContent = `Source term: ${session.source.descriptor} (corpus ${session.source.corpus_id})`;
    section.append(line);

    const diagramRegion = document.createElement("div");
    diagramRegion.className = "diagram-region";
    renderDiagram(
      diagramRegion,
      session.source.diagram,
      { selection: this.state.selection, logScale: this.state.logScale },
      {
        onSelect: (clusterId) => this.select(clusterId),
        onToggleScale: (logScale) => this.toggleScale(logScale),
      },
    );
    section.append(diagramRegion);

    const panelRegion = document.createElement("div");
    panelRegion.className = "panel-region";
    renderClusterPanel(panelRegion, session.source.diagram, this.state.selection, {
      suggestions: this.state.suggestions ?? undefined,
      onMark: (descriptor) => {
        void this.mark(descriptor);
      },
      onLocate: (descriptor) => this.locate(descriptor),
    });
    section.append(panelRegion);

    return section;
  }

  private renderIntermediates(session: SessionView): HTMLElement {
    const section = document.createElement("section");
    section.className = "wizard-intermediates";
    const heading = document.createElement("h3");
    heading.textContent = "Marked intermediates";
    section.append(heading);
    const list = document.createElement("ul");
    for (const entry of session.intermediates) {
      const item = document.createElement("li");
      item.className = "intermediate-entry";
      item.dataset.descriptor = entry.descriptor;
      const corpus =
        entry.corpus_id !== null ? `corpus ${entry.corpus_id}` : "no corpus attached";
      item.textContent = `${entry.descriptor} (cluster ${entry.cluster_id}, ${corpus})`;
      list.append(item);
    }
    section.append(list);
    return section;
  }

  private renderSuggestions(suggestions: SuggestionRow[]): HTMLElement {
    const section = document.createElement("section");
    section.className = "wizard-suggestions";
    const heading = document.createElement("h3");
    heading.textContent = "Screening: ranked candidate clusters";
    section.append(heading);
    const list = document.createElement("ol");
    for (const entry of suggestions) {
      const item = document.createElement("li");
      item.className = "suggestion-entry";
      item.dataset.clusterId = String(entry.cluster_id);
      const score = entry.score !== null ? String(entry.score) : PLACEHOLDER;
      const sir = entry.sir !== null ? String(entry.sir) : PLACEHOLDER;
      const flags = entry.flags.length > 0 ? ` [${entry.flags.join(",")}]` : "";
      item.textContent = `${entry.label} — score ${score}, SIR ${sir}${flags}`;
      list.append(item);
    }
    section.append(list);
    return section;
  }

  private renderTargets(targets: TargetRow[]): HTMLElement {
    const section = document.createElement("section");
    section.className = "wizard-targets";
    const heading = document.createElement("h3");
    heading.textContent = "Target candidates";
    section.append(heading);

    const table = document.createElement("table");
    table.className = "targets-table";
    const head = table.createTHead().insertRow();
    for (const column of [
      "Descriptor",
      "Intermediate",
      "Cluster",
      "STR",
      "Flags",
      "Disjointness",
      "Evidence",
    ]) {
      const th = document.createElement("th");
      th.textContent = column;
      head.append(th);
    }

    const body = table.createTBody();
    for (const target of targets) {
      const row = body.insertRow();
      row.className = "target-row";
      row.dataset.descriptor = target.descriptor;

      const cells: Array<[string, string]> = [
        ["target-descriptor", target.descriptor],
        ["target-intermediate", target.intermediate],
        ["target-cluster", String(target.cluster_id)],
        ["target-ratio", target.report !== null ? String(target.report.ratio) : PLACEHOLDER],
        ["target-flags", target.flags.join(",")],
      ];
      for (const [className, text] of cells) {
        const cell = row.insertCell();
        cell.className = className;
        cell.textContent = text;
      }

      const disjointCell = row.insertCell();
      disjointCell.className = "target-disjoint";
      if (target.disjoint) {
        disjointCell.textContent = "disjoint";
      } else {
        const warning = document.createElement("span");
        warning.className = "warning-icon";
        warning.title = "literatures are not disjoint";
        warning.textContent = "⚠";
        disjointCell.append(warning, document.createTextNode(" shared documents"));
      }

      const evidenceCell = row.insertCell();
      evidenceCell.className = "target-evidence";
      evidenceCell.textContent = target.evidence.join(";");
      if (target.title_warnings.length > 0) {
        const titles = document.createElement("span");
        titles.className = "title-warnings";
        titles.textContent = ` title mentions: ${target.title_warnings.join(";")}`;
        evidenceCell.append(titles);
      }
    }
    section.append(table);
    return section;
  }

  private renderAudit(session: SessionView): HTMLElement {
    const list = document.createElement("ul");
    list.className = "audit-view";
    for (const entry of session.audit_log) {
      const item = document.createElement("li");
      item.className = "audit-entry";
      item.dataset.action = entry.action;
      item.textContent = `#${entry.seq} ${entry.action} @ ${entry.timestamp}`;
      list.append(item);
    }
    return list;
  }
}
