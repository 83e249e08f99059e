export * from "./schema";
export * from "./api";
export * from "./view_model";
export * from "./diagram_view";
export * from "./cluster_panel";
export * from "./wizard";
