/**
 * Interactive scatter view of a strategical diagram.
 *
 * Rendering is a pure function of the latest payload plus local state
 * (selection, scale mode): each call rebuilds the container's children from
 * scratch.  A payload that fails schema validation produces an error banner
 * and no view.
 */

import { parseDiagramPayload, SchemaMismatchError } from "./schema";
import { buildViewModel, DiagramViewModel, makeScale } from "./view_model";

const SVG_NS = "http://www.w3.org/2000/svg";

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 70, right: 24, top: 24, bottom: 52 };

export interface DiagramViewState {
  selection: number | null;
  logScale: boolean;
}

export interface DiagramHandlers {
  onSelect?: (clusterId: number) => void;
  onToggleScale?: (logScale: boolean) => void;
}

export interface RenderedDiagram {
  viewModel: DiagramViewModel;
  svg: SVGSVGElement;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  name: K,
  attrs: Record<string, string> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, value);
  }
  return el;
}

/**
 * Render the diagram into `container`, replacing its contents.  Returns the
 * view model and svg root, or null when the payload was rejected (in which
 * case the container holds only an `.error-banner`).
 */
export function renderDiagram(
  container: HTMLElement,
  payloadData: unknown,
  state: DiagramViewState = { selection: null, logScale: false },
  handlers: DiagramHandlers = {},
): RenderedDiagram | null {
  container.replaceChildren();

  let viewModel: DiagramViewModel;
  try {
    viewModel = buildViewModel(parseDiagramPayload(payloadData), state.selection);
  } catch (error) {
    if (error instanceof SchemaMismatchError) {
      const banner = document.createElement("div");
      banner.className = "error-banner";
      banner.textContent = `Cannot display diagram: ${error.message}`;
      container.append(banner);
      return null;
    }
    throw error;
  }

  const toggle = document.createElement("label");
  toggle.className = "scale-toggle";
  const checkbox = document.createElement("input");
  checkbox.type = "checkbox";
  checkbox.checked = state.logScale;
  checkbox.addEventListener("change", () => {
    handlers.onToggleScale?.(checkbox.checked);
  });
  toggle.append(checkbox, document.createTextNode(" log scale"));

  const svg = svgEl("svg", {
    class: "diagram-view",
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    width: String(WIDTH),
    height: String(HEIGHT),
  });

  const plotLeft = MARGIN.left;
  const plotRight = WIDTH - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = HEIGHT - MARGIN.bottom;

  // Domains include the medians so the reference lines always fall inside
  // the plot, even when every cluster sits to one side of them.
  const xScale = makeScale(
    [...viewModel.markers.map((m) => m.x), viewModel.medians.density],
    plotLeft,
    plotRight,
    state.logScale,
  );
  const yScale = makeScale(
    [...viewModel.markers.map((m) => m.y), viewModel.medians.centrality],
    plotBottom,
    plotTop,
    state.logScale,
  );

  svg.append(
    svgEl("line", {
      class: "axis",
      x1: String(plotLeft),
      y1: String(plotBottom),
      x2: String(plotRight),
      y2: String(plotBottom),
      stroke: "currentColor",
    }),
    svgEl("line", {
      class: "axis",
      x1: String(plotLeft),
      y1: String(plotTop),
      x2: String(plotLeft),
      y2: String(plotBottom),
      stroke: "currentColor",
    }),
  );

  const xLabel = svgEl("text", {
    class: "axis-label",
    x: String((plotLeft + plotRight) / 2),
    y: String(HEIGHT - 12),
    "text-anchor": "middle",
  });
  xLabel.textContent = "Density";
  const yLabel = svgEl("text", {
    class: "axis-label",
    x: "18",
    y: String((plotTop + plotBottom) / 2),
    "text-anchor": "middle",
    transform: `rotate(-90 18 ${(plotTop + plotBottom) / 2})`,
  });
  yLabel.textContent = "Centrality";
  svg.append(xLabel, yLabel);

  const medianX = xScale(viewModel.medians.density);
  const medianY = yScale(viewModel.medians.centrality);
  svg.append(
    svgEl("line", {
      class: "median-line",
      "data-axis": "density",
      x1: String(medianX),
      y1: String(plotTop),
      x2: String(medianX),
      y2: String(plotBottom),
      stroke: "currentColor",
      "stroke-dasharray": "5 4",
    }),
    svgEl("line", {
      class: "median-line",
      "data-axis": "centrality",
      x1: String(plotLeft),
      y1: String(medianY),
      x2: String(plotRight),
      y2: String(medianY),
      stroke: "currentColor",
      "stroke-dasharray": "5 4",
    }),
  );

  for (const marker of viewModel.markers) {
    const classes = ["marker"];
    if (marker.flags.length > 0) {
      classes.push("flagged");
    }
    if (marker.selected) {
      classes.push("selected");
    }
    const circle = svgEl("circle", {
      class: classes.join(" "),
      "data-cluster-id": String(marker.clusterId),
      "data-quadrant": marker.quadrant,
      cx: String(xScale(marker.x)),
      cy: String(yScale(marker.y)),
      r: marker.selected ? "8" : "6",
    });
    const title = svgEl("title");
    title.textContent = `${marker.label} — density ${marker.x}, centrality ${marker.y}`;
    circle.append(title);
    circle.addEventListener("click", () => {
      handlers.onSelect?.(marker.clusterId);
    });
    svg.append(circle);
  }

  container.append(toggle, svg);
  return { viewModel, svg };
}
