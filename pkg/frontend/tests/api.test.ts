import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function stubFetch(status: number, body: unknown) {
  const calls: { url: string; method: string; body?: unknown }[] = [];
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: string, init?: RequestInit) => {
      calls.push({
        url: String(url),
        method: init?.method ?? "GET",
        body: init?.body ? JSON.parse(String(init.body)) : undefined,
      });
      return {
        ok: status >= 200 && status < 300,
        status,
        json: async () => body,
      } as Response;
    }),
  );
  return calls;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("hits only the documented endpoints", async () => {
    const calls = stubFetch(200, { version: 1 });
    const api = new ApiClient("http://x");
    await api.getProject();
    await api.getModel();
    await api.getOntology("AIPL");
    await api.getBlock("AIPL", "&AIPL;P0110", 2);
    await api.listAnnotations();
    await api.reason();
    await api.latestReport();
    expect(calls.map((c) => `${c.method} ${c.url.replace("http://x", "")}`)).toEqual([
      "GET /api/project",
      "GET /api/model",
      "GET /api/ontology/AIPL",
      "GET /api/ontology/AIPL/block?main=%26AIPL%3BP0110&depth=2",
      "GET /api/annotations",
      "POST /api/reason",
      "GET /api/report/latest",
    ]);
  });

  it("quotes the version on mutations", async () => {
    const calls = stubFetch(201, { version: 2, id: "sa12" });
    const api = new ApiClient("");
    await api.postAnnotation({
      version: 1,
      element: "e2",
      sr: "lessGeneral",
      domain: { main: "&A;X", entities: ["&A;X"], triples: [] },
    });
    await api.acceptSuggestion("sug-1", 2).catch(() => undefined);
    expect(calls[0].body).toMatchObject({ version: 1, element: "e2" });
    expect(calls[1].body).toEqual({ version: 2 });
  });

  it("maps 409 onto stale-version errors", async () => {
    stubFetch(409, { detail: { error: "stale version", currentVersion: 5 } });
    const api = new ApiClient("");
    const error = await api
      .postAnnotation({
        version: 1,
        element: "e2",
        sr: "lessGeneral",
        domain: { main: "&A;X", entities: ["&A;X"], triples: [] },
      })
      .then(
        () => null,
        (e: unknown) => e,
      );
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).isStaleVersion).toBe(true);
  });

  it("exposes 422 invariant details", async () => {
    stubFetch(422, { detail: { invariant: "domain non-empty", message: "no entities" } });
    const api = new ApiClient("");
    const error = (await api.deleteAnnotation("sa1", 1).then(
      () => null,
      (e: unknown) => e,
    )) as ApiError;
    expect(error.status).toBe(422);
    expect(error.detail).toMatchObject({ invariant: "domain non-empty" });
  });
});
