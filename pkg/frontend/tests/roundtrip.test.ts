import { randomUUID } from "node:crypto";
import { describe, expect, inject, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { BatchController } from "../src/app.js";
import { CardViewModel } from "../src/viewmodel.js";

const api = () => new ApiClient(inject("baseUrl"));
const fid = () => `ui-${randomUUID().slice(0, 8)}`;

describe("B1 tag filter round-trip", () => {
  it("filters the publication list to exactly the tag's evidence papers", async () => {
    const client = api();
    const id = fid();
    await client.createFolder("graphs", ["P2", "P3"], id);
    const folder = await client.sendFeedback(id, "SaveAuthor", "A3");
    expect(folder.committee).toEqual(["A3"]);

    const details = await client.authorDetails(id, "A2");
    const card = details.card;
    const citedBy = card.tags.findIndex((t) => t.kind === "cited_by");
    expect(citedBy).toBeGreaterThanOrEqual(0);
    const tag = card.tags[citedBy]!;
    expect(tag.committee_author_id).toBe("A3");
    expect([...tag.evidence_paper_ids].sort()).toEqual(["P2", "P3"]);

    const vm = new CardViewModel(card, folder.committee);
    vm.toggleTag(citedBy);
    const visible = vm.visiblePublications().map((p) => p.paper_id);
    expect([...visible].sort()).toEqual([...tag.evidence_paper_ids].sort());
  });

  it("overlays histogram counts equal to served evidence-paper years", async () => {
    const client = api();
    const id = fid();
    await client.createFolder("graphs", ["P2", "P3"], id);
    const folder = await client.sendFeedback(id, "SaveAuthor", "A3");
    const { card } = await client.authorDetails(id, "A2");

    const vm = new CardViewModel(card, folder.committee);
    const citedBy = card.tags.findIndex((t) => t.kind === "cited_by");
    vm.toggleTag(citedBy);
    const tag = card.tags[citedBy]!;

    // Independent recount from the served payload only.
    const served = [
      ...card.ranked_publications.judged_stack,
      ...card.ranked_publications.unjudged,
    ];
    const wantByYear = new Map<number, number>();
    for (const pub of served) {
      if (tag.evidence_paper_ids.includes(pub.paper_id)) {
        wantByYear.set(pub.year, (wantByYear.get(pub.year) ?? 0) + 1);
      }
    }
    let overlayTotal = 0;
    for (const bar of vm.histogram()) {
      expect(bar.overlay).toBe(wantByYear.get(bar.year) ?? 0);
      expect(bar.overlay).toBeLessThanOrEqual(bar.total);
      overlayTotal += bar.overlay;
    }
    expect(overlayTotal).toBe(tag.evidence_paper_ids.length);
  });

  it("selecting every tag of every served card filters exactly", async () => {
    const client = api();
    const controller = new BatchController(client);
    const id = fid();
    await controller.openFolder("graphs", ["P2", "P3"], id);
    await controller.submitFeedback("SaveAuthor", "A3");
    const vms = await controller.loadMore();
    expect(vms.length).toBeGreaterThan(0);
    for (const vm of vms) {
      for (let i = 0; i < vm.card.tags.length; i++) {
        vm.toggleTag(i);
        const visible = vm.visiblePublications().map((p) => p.paper_id);
        expect([...visible].sort()).toEqual(
          [...vm.card.tags[i]!.evidence_paper_ids].sort(),
        );
        vm.toggleTag(i);
      }
    }
  });
});

describe("B2 feedback round-trip", () => {
  it("save author mutates folder state observable via GET", async () => {
    const client = api();
    const controller = new BatchController(client);
    const id = fid();
    await controller.openFolder("graphs", ["P2", "P3"], id);
    const vms = await controller.loadMore();
    const first = vms[0]!.card.author_id;
    await controller.submitFeedback("SaveAuthor", first);
    const seen = await client.getFolder(id);
    expect(seen.committee).toContain(first);
    expect(seen.model_version).toBeGreaterThan(1);
  });

  it("downvoted paper enters the judged stack at the top", async () => {
    const client = api();
    const id = fid();
    await client.createFolder("graphs", ["P2", "P3"], id);
    await client.sendFeedback(id, "DownvotePaper", "P5");
    let seen = await client.getFolder(id);
    expect(seen.downvoted_paper_ids).toContain("P5");

    // P5 is authored by A3 and A4; the stack is most-recent-first.
    let { card } = await client.authorDetails(id, "A3");
    expect(card.ranked_publications.judged_stack[0]?.paper_id).toBe("P5");
    expect(card.ranked_publications.judged_stack[0]?.label).toBe(-1);

    // A later judgment on another paper takes over the top slot.
    await client.sendFeedback(id, "SavePaper", "P4");
    ({ card } = await client.authorDetails(id, "A3"));
    const stack = card.ranked_publications.judged_stack.map((p) => p.paper_id);
    expect(stack).toEqual(["P4", "P5"]);
    expect(card.ranked_publications.judged_stack[0]?.label).toBe(1);

    seen = await client.getFolder(id);
    expect(seen.saved_paper_ids).toContain("P4");
  });

  it("block removes the card from view and from future batches", async () => {
    const client = api();
    const controller = new BatchController(client);
    const id = fid();
    await controller.openFolder("graphs", ["P2", "P3"], id);
    const vms = await controller.loadMore();
    const blocked = vms[0]!.card.author_id;
    await controller.submitFeedback("BlockAuthor", blocked);
    expect(
      controller.cards.map((c) => c.author_id),
    ).not.toContain(blocked);
    const seen = await client.getFolder(id);
    expect(seen.blocked_author_ids).toContain(blocked);

    const fresh = await controller.refresh();
    expect(fresh.map((vm) => vm.card.author_id)).not.toContain(blocked);
  });

  it("rolls back the optimistic update when the service rejects", async () => {
    const client = api();
    const controller = new BatchController(client);
    const id = fid();
    await controller.openFolder("graphs", ["P2", "P3"], id);
    await expect(
      controller.submitFeedback("SaveAuthor", "A999"),
    ).rejects.toThrow(ApiError);
    expect(controller.folder?.committee).toEqual([]);
    expect(controller.errorBanner).toContain("A999");
    const seen = await client.getFolder(id);
    expect(seen.committee).toEqual([]);
  });

  it("consecutive no-feedback batches are disjoint in the view", async () => {
    const controller = new BatchController(api());
    const id = fid();
    await controller.openFolder("graphs", ["P2", "P3"], id);
    const first = (await controller.loadMore()).map((vm) => vm.card.author_id);
    const total = (await controller.loadMore()).map((vm) => vm.card.author_id);
    const second = total.slice(first.length);
    for (const author of second) {
      expect(first).not.toContain(author);
    }
  });
});
