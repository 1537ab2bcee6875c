/**
 * Binary embedding store writer.
 *
 * Layout (all little-endian):
 *   header:  magic "PSEM" | version u32 | dim u32 | count u64
 *   entry:   key_len u32 | pair-key UTF-8 | n u32 | m u32 | (n+m+3)*dim f32
 *
 * The companion JSON index maps pair-key to the absolute byte offset of its
 * entry. Pair-key = SHA-256 hex of `source_raw + "\n" + reference_raw`.
 * Duplicate keys are skipped (content addressing); the header count is
 * patched on close.
 */
import { createHash } from "node:crypto";
import * as fs from "node:fs";

export const MAGIC = "PSEM";
export const FORMAT_VERSION = 1;
export const HEADER_SIZE = 4 + 4 + 4 + 8;

export function pairKey(sourceRaw: string, referenceRaw: string): string {
  return createHash("sha256").update(`${sourceRaw}\n${referenceRaw}`, "utf-8").digest("hex");
}

export function defaultIndexPath(storePath: string): string {
  return `${storePath}.index.json`;
}

function headerBuffer(dim: number, count: number): Buffer {
  const buf = Buffer.alloc(HEADER_SIZE);
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt32LE(FORMAT_VERSION, 4);
  buf.writeUInt32LE(dim, 8);
  buf.writeBigUInt64LE(BigInt(count), 12);
  return buf;
}

export class StoreWriter {
  readonly dim: number;
  private readonly fd: number;
  private readonly storePath: string;
  private readonly indexPath: string;
  private readonly offsets = new Map<string, number>();
  private position = HEADER_SIZE;

  constructor(storePath: string, dim: number, indexPath?: string) {
    this.storePath = storePath;
    this.indexPath = indexPath ?? defaultIndexPath(storePath);
    this.dim = dim;
    this.fd = fs.openSync(storePath, "w");
    fs.writeSync(this.fd, headerBuffer(dim, 0));
  }

  get count(): number {
    return this.offsets.size;
  }

  has(key: string): boolean {
    return this.offsets.has(key);
  }

  /** Append one entry; returns false when the pair-key already exists. */
  add(key: string, n: number, m: number, tokenRows: Float64Array[]): boolean {
    if (this.offsets.has(key)) return false;
    const rows = n + m + 3;
    if (tokenRows.length !== rows) {
      throw new RangeError(`expected ${rows} rows for n=${n}, m=${m}, got ${tokenRows.length}`);
    }
    const keyBytes = Buffer.from(key, "utf-8");
    const meta = Buffer.alloc(4 + keyBytes.length + 8);
    meta.writeUInt32LE(keyBytes.length, 0);
    keyBytes.copy(meta, 4);
    meta.writeUInt32LE(n, 4 + keyBytes.length);
    meta.writeUInt32LE(m, 8 + keyBytes.length);

    const payload = Buffer.alloc(rows * this.dim * 4);
    let cursor = 0;
    for (const row of tokenRows) {
      if (row.length !== this.dim) {
        throw new RangeError(`row has dim ${row.length}, store dim is ${this.dim}`);
      }
      for (const value of row) {
        if (!Number.isFinite(value)) throw new RangeError("non-finite embedding value");
        payload.writeFloatLE(Math.fround(value), cursor);
        cursor += 4;
      }
    }
    this.offsets.set(key, this.position);
    fs.writeSync(this.fd, meta);
    fs.writeSync(this.fd, payload);
    this.position += meta.length + payload.length;
    return true;
  }

  close(): void {
    fs.writeSync(this.fd, headerBuffer(this.dim, this.offsets.size), 0, HEADER_SIZE, 0);
    fs.closeSync(this.fd);
    const index: Record<string, number> = {};
    for (const key of [...this.offsets.keys()].sort()) {
      index[key] = this.offsets.get(key)!;
    }
    fs.writeFileSync(this.indexPath, JSON.stringify(index));
  }
}

export interface StoreEntry {
  key: string;
  n: number;
  m: number;
  rows: Float64Array[];
}

/** Minimal reader used by the exporter's own validation and tests. */
export class StoreReader {
  readonly dim: number;
  readonly count: number;
  readonly index: Record<string, number>;
  private readonly data: Buffer;

  constructor(storePath: string, indexPath?: string) {
    this.data = fs.readFileSync(storePath);
    if (this.data.length < HEADER_SIZE || this.data.toString("ascii", 0, 4) !== MAGIC) {
      throw new Error(`${storePath}: not an embedding store (bad magic)`);
    }
    const version = this.data.readUInt32LE(4);
    if (version !== FORMAT_VERSION) {
      throw new Error(`${storePath}: unsupported format version ${version}`);
    }
    this.dim = this.data.readUInt32LE(8);
    this.count = Number(this.data.readBigUInt64LE(12));
    this.index = JSON.parse(
      fs.readFileSync(indexPath ?? defaultIndexPath(storePath), "utf-8"),
    );
    if (Object.keys(this.index).length !== this.count) {
      throw new Error(`${storePath}: header count disagrees with the index`);
    }
  }

  readAt(offset: number): StoreEntry {
    const keyLen = this.data.readUInt32LE(offset);
    let pos = offset + 4;
    const key = this.data.toString("utf-8", pos, pos + keyLen);
    pos += keyLen;
    const n = this.data.readUInt32LE(pos);
    const m = this.data.readUInt32LE(pos + 4);
    pos += 8;
    const rows: Float64Array[] = [];
    for (let r = 0; r < n + m + 3; r++) {
      const row = new Float64Array(this.dim);
      for (let d = 0; d < this.dim; d++) {
        row[d] = this.data.readFloatLE(pos);
        pos += 4;
      }
      rows.push(row);
    }
    return { key, n, m, rows };
  }

  get(key: string): StoreEntry {
    const offset = this.index[key];
    if (offset === undefined) throw new Error(`pair ${key.slice(0, 12)}... not in store`);
    const entry = this.readAt(offset);
    if (entry.key !== key) {
      throw new Error(`index offset for ${key.slice(0, 12)}... points at the wrong entry`);
    }
    return entry;
  }
}
