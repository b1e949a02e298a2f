/**
 * Reader and writer for the .nrpw conv-weight container.
 *
 * Layout: 4-byte magic "NRPW", uint32 LE version (currently 1), uint64 LE
 * header byte length, UTF-8 JSON header, then the raw payload. The header
 * is an array of records {name, out, in, kh, kw, dtype, offset, len} whose
 * offset/len are relative to the payload region. Payload values are
 * little-endian float32 in row-major [out][in][kh][kw] order.
 *
 * Writes are canonical so equal tensors always serialize to equal bytes:
 * header records keep their keys in sorted order, the JSON carries no
 * whitespace, and payload blocks appear in header order.
 */

export const MAGIC = 'NRPW';
export const VERSION = 1;

const HEADER_START = 16;

export interface WeightTensor {
  name: string;
  out: number;
  in: number;
  kh: number;
  kw: number;
  /** Flat row-major [out][in][kh][kw] values. */
  data: Float32Array;
}

export class FormatError extends Error {}

// Names must survive JSON.stringify unescaped so the canonical bytes match
// across writer implementations: printable ASCII minus '"' and '\'.
const SAFE_NAME = /^[\x20\x21\x23-\x5b\x5d-\x7e]+$/;

function checkTensor(t: WeightTensor): void {
  if (!SAFE_NAME.test(t.name)) {
    throw new FormatError(`layer name ${JSON.stringify(t.name)} is not plain printable ASCII`);
  }
  for (const dim of ['out', 'in', 'kh', 'kw'] as const) {
    const v = t[dim];
    if (!Number.isInteger(v) || v <= 0) {
      throw new FormatError(`layer ${t.name}: dimension ${dim}=${v} must be a positive integer`);
    }
  }
  const expected = t.out * t.in * t.kh * t.kw;
  if (t.data.length !== expected) {
    throw new FormatError(
      `layer ${t.name}: ${t.data.length} values, expected ` +
      `${t.out}x${t.in}x${t.kh}x${t.kw}=${expected}`);
  }
}

export function serializeWeights(tensors: WeightTensor[]): Buffer {
  const seen = new Set<string>();
  const header: object[] = [];
  const payloads: Buffer[] = [];
  let offset = 0;
  for (const t of tensors) {
    checkTensor(t);
    if (seen.has(t.name)) {
      throw new FormatError(`duplicate layer name ${JSON.stringify(t.name)}`);
    }
    seen.add(t.name);
    const block = Buffer.alloc(t.data.length * 4);
    const view = new DataView(block.buffer, block.byteOffset, block.byteLength);
    const bits = new Uint32Array(t.data.buffer, t.data.byteOffset, t.data.length);
    for (let i = 0; i < bits.length; i++) {
      view.setUint32(i * 4, bits[i], true);
    }
    // Key order matches the sorted-key canonical form byte for byte.
    header.push({
      dtype: 'f32', in: t.in, kh: t.kh, kw: t.kw,
      len: block.length, name: t.name, offset, out: t.out,
    });
    payloads.push(block);
    offset += block.length;
  }
  const headerBytes = Buffer.from(JSON.stringify(header), 'utf-8');
  const fixed = Buffer.alloc(HEADER_START);
  fixed.write(MAGIC, 0, 'ascii');
  fixed.writeUInt32LE(VERSION, 4);
  fixed.writeBigUInt64LE(BigInt(headerBytes.length), 8);
  return Buffer.concat([fixed, headerBytes, ...payloads]);
}

interface HeaderRecord {
  name: string;
  out: number;
  in: number;
  kh: number;
  kw: number;
  dtype: string;
  offset: number;
  len: number;
}

export function parseWeights(blob: Buffer): WeightTensor[] {
  if (blob.length < HEADER_START) {
    throw new FormatError(
      `file too short for fixed header: ${blob.length} bytes, need ${HEADER_START}`);
  }
  if (blob.toString('ascii', 0, 4) !== MAGIC) {
    throw new FormatError(`bad magic at byte 0, expected "${MAGIC}"`);
  }
  const version = blob.readUInt32LE(4);
  if (version !== VERSION) {
    throw new FormatError(`unsupported version ${version} at byte 4, expected ${VERSION}`);
  }
  const headerLen = Number(blob.readBigUInt64LE(8));
  const headerEnd = HEADER_START + headerLen;
  if (headerEnd > blob.length) {
    throw new FormatError(
      `header length ${headerLen} at byte 8 runs past end of file (${blob.length} bytes total)`);
  }
  let header: unknown;
  try {
    header = JSON.parse(blob.toString('utf-8', HEADER_START, headerEnd));
  } catch (err) {
    throw new FormatError(`malformed JSON header at byte ${HEADER_START}: ${err}`);
  }
  if (!Array.isArray(header)) {
    throw new FormatError(`header at byte ${HEADER_START} must be a JSON array`);
  }

  const payload = blob.subarray(headerEnd);
  const tensors: WeightTensor[] = [];
  for (let i = 0; i < header.length; i++) {
    const rec = header[i] as HeaderRecord;
    if (typeof rec !== 'object' || rec === null) {
      throw new FormatError(`header entry ${i} is not an object`);
    }
    for (const key of ['name', 'out', 'in', 'kh', 'kw', 'dtype', 'offset', 'len'] as const) {
      if (!(key in rec)) {
        throw new FormatError(`header entry ${i} missing key "${key}"`);
      }
    }
    if (rec.dtype !== 'f32') {
      throw new FormatError(`header entry ${i}: unsupported dtype "${rec.dtype}"`);
    }
    const expected = rec.out * rec.in * rec.kh * rec.kw * 4;
    if (rec.len !== expected) {
      throw new FormatError(
        `header entry ${i}: len ${rec.len} does not match shape, expected ${expected}`);
    }
    if (rec.offset < 0 || rec.offset + rec.len > payload.length) {
      throw new FormatError(
        `header entry ${i}: payload range [${rec.offset}, ${rec.offset + rec.len}) ` +
        `exceeds payload of ${payload.length} bytes`);
    }
    const count = rec.len / 4;
    const data = new Float32Array(count);
    const bits = new Uint32Array(data.buffer);
    const view = new DataView(payload.buffer, payload.byteOffset + rec.offset, rec.len);
    for (let j = 0; j < count; j++) {
      bits[j] = view.getUint32(j * 4, true);
    }
    tensors.push({ name: rec.name, out: rec.out, in: rec.in, kh: rec.kh, kw: rec.kw, data });
  }
  return tensors;
}
