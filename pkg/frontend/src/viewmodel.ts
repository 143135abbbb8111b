import type {
  AuthorCard,
  ExplanationTag,
  PublicationEntry,
} from "./types.js";

export interface HistogramBar {
  year: number;
  total: number;
  relevant: number;
  /** Evidence papers of the selected tag falling in this year; 0 when no
   *  tag is selected. Derived purely from served publication years. */
  overlay: number;
}

/** "Given M. Names Surname" -> "G. M. N. Surname" (§ display option). */
export function collapseFirstNames(displayName: string): string {
  const parts = displayName.trim().split(/\s+/);
  if (parts.length <= 1) return displayName.trim();
  const given = parts.slice(0, -1).map((p) => {
    const stripped = p.replace(/\.$/, "");
    return stripped.length <= 1 ? `${stripped}.` : `${stripped[0]}.`;
  });
  return [...given, parts[parts.length - 1]].join(" ");
}

/** Per-card presentation state over a served author card. All numbers shown
 *  come from the service payload; the view model only selects and groups. */
export class CardViewModel {
  selectedTagIndex: number | null = null;
  stackExpanded = false;
  collapsedFirstNames = true;

  constructor(
    readonly card: AuthorCard,
    readonly committee: ReadonlyArray<string> = [],
  ) {}

  get visibleCutoff(): number {
    return this.card.ranked_publications.default_visible;
  }

  get selectedTag(): ExplanationTag | null {
    if (this.selectedTagIndex === null) return null;
    return this.card.tags[this.selectedTagIndex] ?? null;
  }

  /** Click handler for an explanation pill; clicking again deselects. */
  toggleTag(index: number): void {
    if (index < 0 || index >= this.card.tags.length) {
      throw new RangeError(`no tag at index ${index}`);
    }
    this.selectedTagIndex = this.selectedTagIndex === index ? null : index;
  }

  toggleStack(): void {
    this.stackExpanded = !this.stackExpanded;
  }

  displayName(): string {
    return this.collapsedFirstNames
      ? collapseFirstNames(this.card.display_name)
      : this.card.display_name;
  }

  /** All served publications, judged stack first (already stack-ordered). */
  private allPublications(): PublicationEntry[] {
    const rp = this.card.ranked_publications;
    return [...rp.judged_stack, ...rp.unjudged];
  }

  /** The judged stack as served (most recently judged first). */
  judgedStack(): PublicationEntry[] {
    const stack = this.card.ranked_publications.judged_stack;
    return this.stackExpanded ? stack : stack.slice(0, 1);
  }

  /**
   * The publication rows currently on screen. With a tag selected this is
   * exactly the tag's evidence papers; otherwise the unjudged list up to the
   * visibility cutoff (the stack renders separately via judgedStack).
   */
  visiblePublications(): PublicationEntry[] {
    const tag = this.selectedTag;
    if (tag !== null) {
      const evidence = new Set(tag.evidence_paper_ids);
      return this.allPublications().filter((p) => evidence.has(p.paper_id));
    }
    return this.card.ranked_publications.unjudged.slice(0, this.visibleCutoff);
  }

  /** Served per-year counts plus the selected tag's evidence overlay. */
  histogram(): HistogramBar[] {
    const tag = this.selectedTag;
    const evidence = new Set(tag?.evidence_paper_ids ?? []);
    const overlayByYear = new Map<number, number>();
    for (const pub of this.allPublications()) {
      if (evidence.has(pub.paper_id)) {
        overlayByYear.set(pub.year, (overlayByYear.get(pub.year) ?? 0) + 1);
      }
    }
    return Object.entries(this.card.histogram)
      .map(([year, bucket]) => ({
        year: Number(year),
        total: bucket.total,
        relevant: bucket.relevant,
        overlay: overlayByYear.get(Number(year)) ?? 0,
      }))
      .sort((a, b) => a.year - b.year);
  }

  /** Committee names in paper rows are highlighted (explanation highlights). */
  isHighlighted(authorId: string): boolean {
    return this.committee.includes(authorId);
  }

  pillLabel(tag: ExplanationTag): string {
    const verb = tag.kind === "coauthored_with" ? "coauthored with" : "cited by";
    return `${verb} ${tag.committee_author_id} (×${tag.count})`;
  }
}
