/**
 * WebSocket wrapper: decodes frames, keeps a latest-wins pose buffer,
 * reconnects with backoff, and queues outbound messages while disconnected
 * (flushed in order on reconnect).
 */
import {
  ClientMessage,
  PoseUpdate,
  ServerMessage,
  SolveStats,
  decode,
  encode,
  isError,
  isPoseUpdate,
  isSolveStats,
} from "./protocol.js";

// minimal surface shared by the browser WebSocket and test doubles; handler
// parameter types stay loose so both event hierarchies fit
type SocketLike = {
  send(data: string): void;
  close(): void;
  readyState: number;
  // eslint-disable-next-line @typescript-eslint/no-explicit-any
  onopen: ((ev: any) => void) | null;
  onclose: ((ev: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
  onerror: ((ev: any) => void) | null;
};

export type SocketFactory = (url: string) => SocketLike;

const OPEN = 1;

export class PoseClient {
  latestPose: PoseUpdate | null = null;
  latestStats: SolveStats | null = null;
  connected = false;
  onPose: ((pose: PoseUpdate) => void) | null = null;
  onStats: ((stats: SolveStats) => void) | null = null;
  onServerError: ((message: string) => void) | null = null;
  onStateChange: ((connected: boolean) => void) | null = null;

  private socket: SocketLike | null = null;
  private queue: string[] = [];
  private closed = false;
  private backoffMs = 250;

  constructor(
    private url: string,
    private factory: SocketFactory,
    private reconnect = true,
  ) {}

  connect(): void {
    this.closed = false;
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.connected = true;
      this.backoffMs = 250;
      this.onStateChange?.(true);
      const pending = this.queue;
      this.queue = [];
      for (const frame of pending) socket.send(frame);
    };
    socket.onmessage = (ev) => {
      this.handleFrame(String(ev.data));
    };
    socket.onclose = () => {
      this.connected = false;
      this.onStateChange?.(false);
      if (!this.closed && this.reconnect) {
        setTimeout(() => this.connect(), this.backoffMs);
        this.backoffMs = Math.min(this.backoffMs * 2, 5000);
      }
    };
    socket.onerror = () => {
      /* onclose follows */
    };
  }

  private handleFrame(text: string): void {
    let msg: ServerMessage;
    try {
      msg = decode(text) as ServerMessage;
    } catch {
      return; // tolerate garbage frames
    }
    if (isPoseUpdate(msg)) {
      this.latestPose = msg; // latest wins; render loop picks it up
      this.onPose?.(msg);
    } else if (isSolveStats(msg)) {
      this.latestStats = msg;
      this.onStats?.(msg);
    } else if (isError(msg)) {
      this.onServerError?.(msg.message);
    }
  }

  /** Send now, or queue until the socket reopens. */
  send(message: ClientMessage): void {
    const frame = encode(message);
    if (this.socket && this.socket.readyState === OPEN) {
      this.socket.send(frame);
    } else {
      this.queue.push(frame);
    }
  }

  get queuedCount(): number {
    return this.queue.length;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
