// WebSocket transport for the line protocol, with automatic reconnect.

import { encodeLine, parseServerLine, type ServerMessage } from "./protocol.js";

export interface ConnectionHandlers {
  onOpen(): void;
  onClose(): void;
  onMessage(msg: ServerMessage): void;
}

const RECONNECT_DELAY_MS = 1500;

export class ServiceConnection {
  private socket: WebSocket | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly handlers: ConnectionHandlers,
  ) {}

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => this.handlers.onOpen();
    socket.onmessage = (event) => {
      if (typeof event.data !== "string") return;
      for (const line of event.data.split("\n")) {
        if (!line.trim()) continue;
        const msg = parseServerLine(line);
        if (msg) this.handlers.onMessage(msg);
      }
    };
    socket.onclose = () => {
      this.handlers.onClose();
      if (!this.closed) {
        this.timer = setTimeout(() => this.open(), RECONNECT_DELAY_MS);
      }
    };
    socket.onerror = () => socket.close();
  }

  send(msg: object): void {
    if (this.socket && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(encodeLine(msg));
    }
  }

  close(): void {
    this.closed = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.socket?.close();
  }
}
