import type { CardViewModel } from "./viewmodel.js";
import type { PublicationEntry } from "./types.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function authorSpan(vm: CardViewModel, authorId: string): string {
  const cls = vm.isHighlighted(authorId) ? "author highlight" : "author";
  return `<span class="${cls}">${esc(authorId)}</span>`;
}

function publicationRow(vm: CardViewModel, pub: PublicationEntry): string {
  const authors = pub.author_ids.map((a) => authorSpan(vm, a)).join(", ");
  const judged =
    pub.label === undefined
      ? ""
      : ` <span class="judged">${pub.label > 0 ? "saved" : "downvoted"}</span>`;
  return (
    `<li data-paper="${esc(pub.paper_id)}">` +
    `<span class="title">${esc(pub.title)}</span> ` +
    `<span class="year">(${pub.year})</span> ${authors}${judged}` +
    `<button data-action="SavePaper">save</button>` +
    `<button data-action="DownvotePaper">downvote</button></li>`
  );
}

/** One author card as a static HTML fragment (event wiring is the host's). */
export function renderCard(vm: CardViewModel): string {
  const pills = vm.card.tags
    .map((tag, i) => {
      const selected = vm.selectedTagIndex === i ? " selected" : "";
      return `<button class="pill${selected}" data-tag="${i}">${esc(
        vm.pillLabel(tag),
      )}</button>`;
    })
    .join("");
  const bars = vm
    .histogram()
    .map(
      (bar) =>
        `<div class="bar" data-year="${bar.year}" data-total="${bar.total}"` +
        ` data-relevant="${bar.relevant}" data-overlay="${bar.overlay}"></div>`,
    )
    .join("");
  const stack = vm.judgedStack().map((p) => publicationRow(vm, p)).join("");
  const visible = vm
    .visiblePublications()
    .map((p) => publicationRow(vm, p))
    .join("");
  const stats =
    `<span class="votes">votes ${vm.card.vote_count}</span>` +
    `<span class="ratio">ratio ${vm.card.relevance_ratio.toFixed(3)}</span>` +
    (vm.card.h_index === null
      ? ""
      : `<span class="hindex">h ${vm.card.h_index}</span>`);
  return (
    `<section class="card" data-author="${esc(vm.card.author_id)}">` +
    `<header><h2 title="${esc(vm.card.display_name)}">${esc(
      vm.displayName(),
    )}</h2>` +
    `<span class="origin">${esc(vm.card.strategy_origin)}</span>${stats}` +
    `<button data-action="SaveAuthor">save author</button>` +
    `<button data-action="BlockAuthor">block</button></header>` +
    `<div class="pills">${pills}</div>` +
    `<div class="histogram">${bars}</div>` +
    `<ol class="judged-stack">${stack}</ol>` +
    `<ol class="publications">${visible}</ol>` +
    `</section>`
  );
}

export function renderBatch(viewModels: CardViewModel[]): string {
  const cards = viewModels.map(renderCard).join("\n");
  return (
    `<main class="batch">${cards}` +
    `<button class="load-more">Load More Authors</button></main>`
  );
}
