/** JSON shapes served by the discovery service. The UI never computes
 *  scores or votes itself; every displayed number comes from these. */

export type TagKind = "coauthored_with" | "cited_by";

export interface ExplanationTag {
  kind: TagKind;
  committee_author_id: string;
  evidence_paper_ids: string[];
  count: number;
}

export interface PublicationEntry {
  paper_id: string;
  title: string;
  year: number;
  author_ids: string[];
  score: number | null;
  /** Present only on judged-stack entries: +1 saved, -1 downvoted. */
  label?: number;
}

export interface RankedPublications {
  judged_stack: PublicationEntry[];
  unjudged: PublicationEntry[];
  default_visible: number;
}

export interface HistogramBucket {
  total: number;
  relevant: number;
}

export interface AuthorCard {
  author_id: string;
  display_name: string;
  strategy_origin: string;
  vote_count: number;
  tags: ExplanationTag[];
  relevant_paper_count: number;
  total_paper_count: number;
  h_index: number | null;
  citation_count: number;
  histogram: Record<string, HistogramBucket>;
  relevance_ratio: number;
  ranked_publications: RankedPublications;
  score_snapshot: Record<string, number>;
}

export interface FolderState {
  folder_id: string;
  topic_name: string;
  seed_paper_ids: string[];
  saved_paper_ids: string[];
  downvoted_paper_ids: string[];
  committee: string[];
  blocked_author_ids: string[];
  user_author_id: string | null;
  model_version: number;
  seed_warning: boolean;
  batch_counter: number;
}

export interface BatchResponse {
  folder_id: string;
  model_version: number;
  batch_counter: number;
  cards: AuthorCard[];
}

export interface AuthorDetailsResponse {
  model_version: number;
  card: AuthorCard;
}

export interface AuthorSearchResult {
  author_id: string;
  display_name: string;
  publication_count: number;
  h_index: number | null;
  citation_count: number;
}

export interface SearchResponse {
  query: string;
  results: AuthorSearchResult[];
}

export interface HealthResponse {
  status: string;
  papers: number;
  authors: number;
  dangling_ref_count: number;
  embedding_dim: number | null;
}

export type FeedbackAction =
  | "SavePaper"
  | "DownvotePaper"
  | "UndoPaper"
  | "SaveAuthor"
  | "BlockAuthor"
  | "RemoveAuthor";
