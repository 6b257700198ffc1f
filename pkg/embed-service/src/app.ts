/**
 * HTTP wiring for the embedding service.
 *
 * POST /embed  {texts: [1..512 strings, each <= 8192 chars]}
 *              -> 200 {vectors: unit-L2 vectors in request order}
 *              -> 400 on an invalid or oversized payload, 503 while loading
 * GET  /health -> 200 {model, dim} once ready, 503 before
 *
 * The service is stateless: no cache, no persistence, no authentication.
 * Deploy it on a trusted network only. Callers batch (up to 512 texts per
 * request) and cache on their side.
 */

import express, { type NextFunction, type Request, type Response } from "express";
import { z } from "zod";

import { type Embedder } from "./embedder.js";

export const MAX_TEXTS = 512;
export const MAX_TEXT_CHARS = 8192;

const embedRequestSchema = z.object({
  texts: z.array(z.string().max(MAX_TEXT_CHARS)).min(1).max(MAX_TEXTS),
});

export interface ServiceState {
  embedder: Embedder;
  ready: boolean;
}

export function createApp(state: ServiceState): express.Express {
  const app = express();
  app.use(express.json({ limit: "16mb" }));

  app.get("/health", (_req: Request, res: Response) => {
    if (!state.ready) {
      res.status(503).json({ error: "model loading" });
      return;
    }
    res.json({ model: state.embedder.model, dim: state.embedder.dim });
  });

  app.post("/embed", (req: Request, res: Response) => {
    if (!state.ready) {
      res.status(503).json({ error: "model loading" });
      return;
    }
    const parsed = embedRequestSchema.safeParse(req.body);
    if (!parsed.success) {
      const issue = parsed.error.issues[0];
      const where = issue.path.length ? `${issue.path.join(".")}: ` : "";
      res.status(400).json({ error: `${where}${issue.message}` });
      return;
    }
    res.json({ vectors: state.embedder.embed(parsed.data.texts) });
  });

  // Body-parser failures (malformed JSON, body over the transport limit)
  // land here; report them as bad requests rather than server errors.
  app.use((err: unknown, _req: Request, res: Response, next: NextFunction) => {
    if (res.headersSent) {
      next(err);
      return;
    }
    const message = err instanceof Error ? err.message : "invalid request body";
    res.status(400).json({ error: message });
  });

  return app;
}
