/** Shared test scaffolding: a route-based fetch stub for the API client. */

import { ApiClient } from "../src/api.js";

export type Route = {
  method: string;
  path: string | RegExp;
  reply: (body?: unknown) => unknown;
  status?: number;
};

export function stubFetch(routes: Route[]): {
  client: ApiClient;
  calls: { method: string; url: string; body?: unknown }[];
} {
  const calls: { method: string; url: string; body?: unknown }[] = [];
  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    let body: unknown;
    if (typeof init?.body === "string") {
      try {
        body = JSON.parse(init.body);
      } catch {
        body = init.body;
      }
    }
    calls.push({ method, url, body });
    for (const route of routes) {
      const matches =
        typeof route.path === "string" ? url === route.path : route.path.test(url);
      if (matches && route.method === method) {
        const payload = route.reply(body);
        return new Response(JSON.stringify(payload), {
          status: route.status ?? 200,
          headers: { "Content-Type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ detail: `no route for ${method} ${url}` }), {
      status: 404,
    });
  };
  return { client: new ApiClient("", "test-token", fetchImpl), calls };
}

export function container(): HTMLElement {
  const node = document.createElement("div");
  document.body.appendChild(node);
  return node;
}
