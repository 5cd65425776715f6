// HTTP + websocket client for the governance service. All world-changing
// actions go to the server; the returned messages are rendered verbatim.

import {
  JoinedMessage,
  BallotMessage,
  AckMessage,
  ProposeRequest,
  ServerMessage,
  Snapshot,
  VoteRequest,
} from "./protocol.js";

export class ServiceError extends Error {
  constructor(
    public code: string,
    public detail: string,
    public status: number,
  ) {
    super(`${code}: ${detail}`);
  }
}

async function request<T>(base: string, method: string, path: string, body?: unknown): Promise<T> {
  const response = await fetch(base.replace(/\/$/, "") + path, {
    method,
    headers: body !== undefined ? { "content-type": "application/json" } : undefined,
    body: body !== undefined ? JSON.stringify(body) : undefined,
  });
  const doc = await response.json();
  if (!response.ok) {
    throw new ServiceError(doc.error ?? "HTTPError", doc.detail ?? String(response.status),
                           response.status);
  }
  return doc as T;
}

export class ServiceClient {
  constructor(public base: string) {}

  join(): Promise<JoinedMessage> {
    return request(this.base, "POST", "/join");
  }

  state(): Promise<Snapshot> {
    return request(this.base, "GET", "/state");
  }

  citizen(session: string): Promise<JoinedMessage> {
    return request(this.base, "GET", `/citizen/${session}`);
  }

  propose(req: ProposeRequest): Promise<BallotMessage> {
    return request(this.base, "POST", "/propose", req);
  }

  vote(req: VoteRequest): Promise<AckMessage> {
    return request(this.base, "POST", "/vote", req);
  }

  async metricsCsv(): Promise<string> {
    const response = await fetch(this.base.replace(/\/$/, "") + "/metrics");
    return response.text();
  }

  // live snapshot stream; returns a disconnect function
  connectLive(
    onMessage: (msg: ServerMessage) => void,
    socketFactory?: (url: string) => WebSocket,
  ): () => void {
    const wsUrl = this.base.replace(/^http/, "ws").replace(/\/$/, "") + "/live";
    let closed = false;
    let retryMs = 1000;
    let ws: WebSocket | null = null;

    const open = () => {
      ws = socketFactory ? socketFactory(wsUrl) : new WebSocket(wsUrl);
      ws.onopen = () => {
        retryMs = 1000;
      };
      ws.onmessage = (event: MessageEvent) => {
        try {
          onMessage(JSON.parse(String(event.data)) as ServerMessage);
        } catch {
          // non-JSON frames are ignored
        }
      };
      ws.onclose = () => {
        if (!closed) {
          setTimeout(open, retryMs);
          retryMs = Math.min(retryMs * 2, 8000);
        }
      };
    };
    open();
    return () => {
      closed = true;
      ws?.close();
    };
  }
}
