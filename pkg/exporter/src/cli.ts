#!/usr/bin/env node
/**
 * export-embeddings --in pairs.jsonl --out store.bin [--encoder hash]
 *                   [--dim 768] [--batch 32] [--pool mean|last]
 *                   [--max-subwords 512] [--index path]
 */
import { runExport } from "./export";

function parseArgs(argv: string[]): Map<string, string> {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) throw new Error(`unexpected argument: ${arg}`);
    const value = argv[i + 1];
    if (value === undefined || value.startsWith("--")) {
      throw new Error(`missing value for ${arg}`);
    }
    args.set(arg.slice(2), value);
    i++;
  }
  return args;
}

function main(): number {
  const args = parseArgs(process.argv.slice(2));
  const input = args.get("in");
  const output = args.get("out");
  if (!input || !output) {
    console.error(
      "usage: export-embeddings --in pairs.jsonl --out store.bin " +
        "[--encoder hash] [--dim 768] [--batch 32] [--pool mean|last] " +
        "[--max-subwords 512] [--index path]",
    );
    return 2;
  }
  const pool = args.get("pool") ?? "mean";
  if (pool !== "mean" && pool !== "last") {
    console.error(`--pool must be "mean" or "last", got "${pool}"`);
    return 2;
  }
  const stats = runExport({
    inputPath: input,
    outputPath: output,
    indexPath: args.get("index"),
    encoder: args.get("encoder") ?? "hash",
    dim: Number(args.get("dim") ?? 768),
    batchSize: Number(args.get("batch") ?? 32),
    pool,
    maxSubwords: Number(args.get("max-subwords") ?? 512),
  });
  console.error(
    `read ${stats.pairsRead} pairs -> wrote ${stats.written} entries ` +
      `(${stats.deduplicated} duplicates, ${stats.skippedOverLength} over-length) to ${output}`,
  );
  return 0;
}

process.exit(main());
