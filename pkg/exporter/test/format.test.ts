import { describe, expect, it } from 'vitest';

import { FormatError, parseWeights, serializeWeights, WeightTensor } from '../src/format';

function tensor(name: string, out: number, inC: number, kh: number, kw: number,
                values: number[]): WeightTensor {
  return { name, out, in: inC, kh, kw, data: Float32Array.from(values) };
}

describe('serializeWeights', () => {
  it('emits the canonical byte layout', () => {
    const blob = serializeWeights([tensor('a', 2, 1, 1, 1, [1.5, -2.0])]);
    expect(blob.toString('ascii', 0, 4)).toBe('NRPW');
    expect(blob.readUInt32LE(4)).toBe(1);

    const headerText =
      '[{"dtype":"f32","in":1,"kh":1,"kw":1,"len":8,"name":"a","offset":0,"out":2}]';
    expect(Number(blob.readBigUInt64LE(8))).toBe(headerText.length);
    expect(blob.toString('utf-8', 16, 16 + headerText.length)).toBe(headerText);

    // 1.5 and -2.0 as little-endian float32
    const payload = blob.subarray(16 + headerText.length);
    expect([...payload]).toEqual([0x00, 0x00, 0xc0, 0x3f, 0x00, 0x00, 0x00, 0xc0]);
  });

  it('round-trips names, shapes, and exact bits', () => {
    const values = [0, -0, 1 / 3, 1e-40, 3.4e38, -1234.5678];
    const tensors = [
      tensor('conv1', 2, 3, 1, 1, values),
      tensor('head/logits', 1, 2, 1, 2, values.slice(0, 4)),
    ];
    const parsed = parseWeights(serializeWeights(tensors));
    expect(parsed.map((t) => t.name)).toEqual(['conv1', 'head/logits']);
    for (let i = 0; i < tensors.length; i++) {
      expect(parsed[i].out).toBe(tensors[i].out);
      expect(parsed[i].in).toBe(tensors[i].in);
      expect(parsed[i].kh).toBe(tensors[i].kh);
      expect(parsed[i].kw).toBe(tensors[i].kw);
      const want = new Uint32Array(tensors[i].data.buffer);
      const got = new Uint32Array(parsed[i].data.buffer);
      expect([...got]).toEqual([...want]);
    }
  });

  it('is deterministic', () => {
    const make = () => serializeWeights([tensor('x', 1, 2, 2, 1, [0.1, 0.2, 0.3, 0.4])]);
    expect(make().equals(make())).toBe(true);
  });

  it('rejects names that would not serialize canonically', () => {
    for (const name of ['', 'a"b', 'a\\b', 'café', 'tab\tname']) {
      expect(() => serializeWeights([tensor(name, 1, 1, 1, 1, [0])]))
        .toThrow(FormatError);
    }
  });

  it('rejects shape and size mismatches', () => {
    expect(() => serializeWeights([tensor('a', 2, 1, 1, 1, [0])])).toThrow(/expected 2x1x1x1/);
    expect(() => serializeWeights([tensor('a', 0, 1, 1, 1, [])])).toThrow(/positive integer/);
    expect(() => serializeWeights([
      tensor('a', 1, 1, 1, 1, [0]), tensor('a', 1, 1, 1, 1, [1]),
    ])).toThrow(/duplicate layer name/);
  });
});

describe('parseWeights', () => {
  const good = serializeWeights([tensor('a', 1, 1, 1, 2, [1, 2])]);

  it('rejects short, corrupt, and truncated blobs', () => {
    expect(() => parseWeights(good.subarray(0, 10))).toThrow(/too short/);

    const badMagic = Buffer.from(good);
    badMagic.write('XXXX', 0, 'ascii');
    expect(() => parseWeights(badMagic)).toThrow(/bad magic/);

    const badVersion = Buffer.from(good);
    badVersion.writeUInt32LE(9, 4);
    expect(() => parseWeights(badVersion)).toThrow(/unsupported version 9/);

    const badLen = Buffer.from(good);
    badLen.writeBigUInt64LE(BigInt(good.length), 8);
    expect(() => parseWeights(badLen)).toThrow(/runs past end/);

    expect(() => parseWeights(good.subarray(0, good.length - 4))).toThrow(/exceeds payload/);
  });

  it('rejects headers with wrong structure', () => {
    const withHeader = (headerText: string, payload: Buffer) => {
      const headerBytes = Buffer.from(headerText, 'utf-8');
      const fixed = Buffer.alloc(16);
      fixed.write('NRPW', 0, 'ascii');
      fixed.writeUInt32LE(1, 4);
      fixed.writeBigUInt64LE(BigInt(headerBytes.length), 8);
      return Buffer.concat([fixed, headerBytes, payload]);
    };
    expect(() => parseWeights(withHeader('{}', Buffer.alloc(0)))).toThrow(/JSON array/);
    expect(() => parseWeights(withHeader('[3]', Buffer.alloc(0)))).toThrow(/not an object/);
    expect(() => parseWeights(withHeader('[{"name":"a"}]', Buffer.alloc(0))))
      .toThrow(/missing key/);
    const f64Rec = '{"dtype":"f64","in":1,"kh":1,"kw":1,"len":8,"name":"a","offset":0,"out":1}';
    expect(() => parseWeights(withHeader(`[${f64Rec}]`, Buffer.alloc(8))))
      .toThrow(/unsupported dtype "f64"/);
    const shortRec = '{"dtype":"f32","in":1,"kh":1,"kw":1,"len":8,"name":"a","offset":0,"out":1}';
    expect(() => parseWeights(withHeader(`[${shortRec}]`, Buffer.alloc(8))))
      .toThrow(/does not match shape/);
  });
});
