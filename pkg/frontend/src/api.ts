import type {
  AuthorDetailsResponse,
  BatchResponse,
  FeedbackAction,
  FolderState,
  HealthResponse,
  SearchResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`service error ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

/** Thin typed client over the service's JSON API. */
export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
  ): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const payload = (await resp.json()) as { detail?: string };
        if (payload.detail) detail = payload.detail;
      } catch {
        // keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/health");
  }

  createFolder(
    topicName: string,
    seedPaperIds: string[],
    folderId?: string,
    requestId?: string,
  ): Promise<FolderState> {
    return this.request("POST", "/folders", {
      topic_name: topicName,
      seed_paper_ids: seedPaperIds,
      folder_id: folderId,
      request_id: requestId,
    });
  }

  getFolder(folderId: string): Promise<FolderState> {
    return this.request("GET", `/folders/${folderId}`);
  }

  sendFeedback(
    folderId: string,
    action: FeedbackAction,
    subjectId: string,
    requestId?: string,
  ): Promise<FolderState> {
    return this.request("POST", `/folders/${folderId}/feedback`, {
      action,
      subject_id: subjectId,
      request_id: requestId,
    });
  }

  nextBatch(folderId: string, requestId?: string): Promise<BatchResponse> {
    return this.request("POST", `/folders/${folderId}/batches`, {
      request_id: requestId,
    });
  }

  authorDetails(
    folderId: string,
    authorId: string,
  ): Promise<AuthorDetailsResponse> {
    return this.request("GET", `/folders/${folderId}/authors/${authorId}`);
  }

  searchAuthors(query: string): Promise<SearchResponse> {
    return this.request(
      "GET",
      `/search/authors?q=${encodeURIComponent(query)}`,
    );
  }
}
