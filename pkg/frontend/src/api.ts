import type { CreatedSession, SessionSpec, SessionState } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await response.text();
  if (!response.ok) {
    let detail = body;
    try {
      detail = JSON.stringify(JSON.parse(body).detail);
    } catch {
      // not JSON, keep raw body
    }
    throw new ApiError(response.status, detail);
  }
  return JSON.parse(body) as T;
}

export class ApiClient {
  constructor(private base: string) {}

  createSession(spec: SessionSpec): Promise<CreatedSession> {
    return request(`${this.base}/sessions`, {
      method: "POST",
      body: JSON.stringify(spec),
    });
  }

  getState(id: string): Promise<SessionState> {
    return request(`${this.base}/sessions/${id}`);
  }

  step(id: string, count: number): Promise<{ cursor: number }> {
    return request(`${this.base}/sessions/${id}/step`, {
      method: "POST",
      body: JSON.stringify({ count }),
    });
  }

  feedback(
    id: string,
    plus: number[],
    minus: number[],
  ): Promise<{ recommendation: number[] }> {
    return request(`${this.base}/sessions/${id}/feedback`, {
      method: "POST",
      body: JSON.stringify({ plus, minus }),
    });
  }

  materialize(
    id: string,
    create: number[],
    drop: number[],
  ): Promise<{ materialized: number[]; recommendation: number[] }> {
    return request(`${this.base}/sessions/${id}/materialize`, {
      method: "POST",
      body: JSON.stringify({ create, drop }),
    });
  }
}
