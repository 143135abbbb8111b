import { ApiClient, ApiError } from "./api.js";
import { CardViewModel } from "./viewmodel.js";
import type { AuthorCard, FeedbackAction, FolderState } from "./types.js";

/**
 * Drives one folder tab: renders served batches in order, forwards feedback
 * optimistically, and reconciles with the service acknowledgement. Nothing
 * here recomputes scores or votes; state mirrors the service's responses.
 */
export class BatchController {
  folder: FolderState | null = null;
  cards: AuthorCard[] = [];
  errorBanner: string | null = null;
  /** Set when a response carries a newer model_version than the cards shown. */
  refreshPrompt = false;
  private lastSeenModelVersion = 0;

  constructor(readonly api: ApiClient) {}

  async openFolder(
    topicName: string,
    seedPaperIds: string[],
    folderId?: string,
  ): Promise<FolderState> {
    this.folder = await this.api.createFolder(topicName, seedPaperIds, folderId);
    this.lastSeenModelVersion = this.folder.model_version;
    return this.folder;
  }

  private requireFolder(): FolderState {
    if (!this.folder) throw new Error("no folder open");
    return this.folder;
  }

  /** "Load More Authors": appends the next served batch, in served order. */
  async loadMore(): Promise<CardViewModel[]> {
    const folder = this.requireFolder();
    try {
      const batch = await this.api.nextBatch(folder.folder_id);
      this.noteModelVersion(batch.model_version);
      this.cards = [...this.cards, ...batch.cards];
      this.errorBanner = null;
    } catch (err) {
      this.errorBanner = err instanceof ApiError ? err.detail : String(err);
    }
    return this.viewModels();
  }

  viewModels(): CardViewModel[] {
    const committee = this.folder?.committee ?? [];
    return this.cards.map((card) => new CardViewModel(card, committee));
  }

  /**
   * Optimistic feedback: the visible state flips immediately, the service
   * response replaces it on ack, and the snapshot is restored on rejection.
   */
  async submitFeedback(
    action: FeedbackAction,
    subjectId: string,
  ): Promise<FolderState> {
    const folder = this.requireFolder();
    const before = { folder: { ...folder }, cards: [...this.cards] };
    this.applyOptimistic(action, subjectId);
    try {
      const updated = await this.api.sendFeedback(
        folder.folder_id,
        action,
        subjectId,
      );
      this.folder = updated;
      this.noteModelVersion(updated.model_version);
      this.errorBanner = null;
      return updated;
    } catch (err) {
      this.folder = before.folder;
      this.cards = before.cards;
      this.errorBanner = err instanceof ApiError ? err.detail : String(err);
      throw err;
    }
  }

  private applyOptimistic(action: FeedbackAction, subjectId: string): void {
    const folder = this.requireFolder();
    if (action === "SaveAuthor" && !folder.committee.includes(subjectId)) {
      this.folder = { ...folder, committee: [...folder.committee, subjectId] };
    } else if (action === "BlockAuthor") {
      this.folder = {
        ...folder,
        committee: folder.committee.filter((a) => a !== subjectId),
        blocked_author_ids: [...folder.blocked_author_ids, subjectId],
      };
      // Blocked author's card leaves the batch view immediately.
      this.cards = this.cards.filter((c) => c.author_id !== subjectId);
    } else if (action === "SavePaper") {
      this.folder = {
        ...folder,
        saved_paper_ids: [...new Set([...folder.saved_paper_ids, subjectId])],
        downvoted_paper_ids: folder.downvoted_paper_ids.filter(
          (p) => p !== subjectId,
        ),
      };
    } else if (action === "DownvotePaper") {
      this.folder = {
        ...folder,
        downvoted_paper_ids: [
          ...new Set([...folder.downvoted_paper_ids, subjectId]),
        ],
        saved_paper_ids: folder.saved_paper_ids.filter((p) => p !== subjectId),
      };
    }
  }

  private noteModelVersion(version: number): void {
    if (version > this.lastSeenModelVersion && this.cards.length > 0) {
      this.refreshPrompt = true;
    }
    this.lastSeenModelVersion = version;
  }

  /** Accept the refresh prompt: drop stale cards and fetch a fresh batch. */
  async refresh(): Promise<CardViewModel[]> {
    this.cards = [];
    this.refreshPrompt = false;
    return this.loadMore();
  }
}
