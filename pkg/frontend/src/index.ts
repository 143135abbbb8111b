export { ApiClient, ApiError } from "./api.js";
export { BatchController } from "./app.js";
export { renderBatch, renderCard } from "./render.js";
export { CardViewModel, collapseFirstNames } from "./viewmodel.js";
export type * from "./types.js";
