/**
 * Export job: read JSONL sentence pairs, encode each pair jointly, pool
 * subword vectors back to whitespace tokens, and write the binary store plus
 * its offset index. Over-length pairs are skipped and logged; duplicate pairs
 * are deduplicated by content-addressed key.
 */
import * as fs from "node:fs";

import { buildEncoder, Encoder, PoolMode, poolToTokens } from "./encoder";
import { pairKey, StoreWriter } from "./format";

export interface ExportJob {
  inputPath: string;
  outputPath: string;
  indexPath?: string;
  encoder: string;
  dim: number;
  batchSize: number;
  pool: PoolMode;
  maxSubwords: number;
}

export interface ExportStats {
  pairsRead: number;
  written: number;
  deduplicated: number;
  skippedOverLength: number;
}

interface RawPair {
  source: string;
  reference: string;
}

export function readPairs(path: string): RawPair[] {
  const pairs: RawPair[] = [];
  const text = fs.readFileSync(path, "utf-8");
  for (const [lineNo, line] of text.split("\n").entries()) {
    const trimmed = line.trim();
    if (!trimmed) continue;
    const row = JSON.parse(trimmed);
    if (typeof row.source !== "string" || typeof row.reference !== "string") {
      throw new Error(`${path}:${lineNo + 1}: rows need string "source" and "reference"`);
    }
    pairs.push({ source: row.source, reference: row.reference });
  }
  return pairs;
}

const tokenize = (raw: string): string[] => raw.split(/\s+/).filter(Boolean);

export function runExport(job: ExportJob, log: (msg: string) => void = console.error): ExportStats {
  const encoder: Encoder = buildEncoder(job.encoder, job.dim, job.maxSubwords);
  const pairs = readPairs(job.inputPath);
  const writer = new StoreWriter(job.outputPath, encoder.dim, job.indexPath);
  const stats: ExportStats = {
    pairsRead: pairs.length,
    written: 0,
    deduplicated: 0,
    skippedOverLength: 0,
  };
  for (let start = 0; start < pairs.length; start += job.batchSize) {
    const batch = pairs.slice(start, start + job.batchSize);
    const tokenized = batch.map((pair) => ({
      source: tokenize(pair.source),
      reference: tokenize(pair.reference),
    }));
    for (const [i, pair] of batch.entries()) {
      const key = pairKey(pair.source, pair.reference);
      if (writer.has(key)) {
        stats.deduplicated++;
        continue;
      }
      const { source, reference } = tokenized[i];
      let tokenRows: Float64Array[];
      try {
        const [encoded] = encoder.encodeBatch([{ source, reference }]);
        tokenRows = poolToTokens(encoded, encoder.dim, job.pool);
      } catch (err) {
        if (err instanceof RangeError) {
          stats.skippedOverLength++;
          log(`skipping over-length pair ${key.slice(0, 12)}...: ${err.message}`);
          continue;
        }
        throw err;
      }
      writer.add(key, source.length, reference.length, tokenRows);
      stats.written++;
    }
  }
  writer.close();
  return stats;
}
