/** Client-side mirror of the authoritative lattice state.
 *
 * The mirror never mutates itself from user input: it is only rebuilt from
 * server state payloads.  Its canonical serialization — one line
 * `id x y z orientation` per cube in ascending id order, joined with
 * newlines — matches the service byte for byte, so the SHA-256 of that
 * text reconciles directly against the server's state hash.
 */

import type { CubeRecord, StatePayload, Vec3 } from "./protocol.js";

function addressKey(x: number, y: number, z: number): string {
  return `${x},${y},${z}`;
}

export class LatticeMirror {
  private readonly byId = new Map<number, CubeRecord>();
  private readonly occupancy = new Map<string, number>();

  static fromState(payload: StatePayload): LatticeMirror {
    const mirror = new LatticeMirror();
    for (const cube of payload.cubes) {
      mirror.add(cube);
    }
    return mirror;
  }

  private add(cube: CubeRecord): void {
    if (this.byId.has(cube.id)) {
      throw new Error(`duplicate cube id ${cube.id}`);
    }
    const key = addressKey(cube.x, cube.y, cube.z);
    if (this.occupancy.has(key)) {
      throw new Error(`two cubes share the cell (${key})`);
    }
    this.byId.set(cube.id, { ...cube });
    this.occupancy.set(key, cube.id);
  }

  get size(): number {
    return this.byId.size;
  }

  cube(id: number): CubeRecord | undefined {
    return this.byId.get(id);
  }

  cubes(): CubeRecord[] {
    return [...this.byId.values()].sort((a, b) => a.id - b.id);
  }

  occupied(x: number, y: number, z: number): boolean {
    return this.occupancy.has(addressKey(x, y, z));
  }

  occupant(x: number, y: number, z: number): number | undefined {
    return this.occupancy.get(addressKey(x, y, z));
  }

  canonicalLines(): string[] {
    return this.cubes().map(
      (c) => `${c.id} ${c.x} ${c.y} ${c.z} ${c.orientation}`,
    );
  }

  async stateHash(): Promise<string> {
    return sha256Hex(this.canonicalLines().join("\n"));
  }
}

/** SHA-256 of a UTF-8 string, lowercase hex (Web Crypto; works in Node too). */
export async function sha256Hex(text: string): Promise<string> {
  const bytes = new TextEncoder().encode(text);
  const digest = await crypto.subtle.digest("SHA-256", bytes);
  return [...new Uint8Array(digest)]
    .map((b) => b.toString(16).padStart(2, "0"))
    .join("");
}

export function sameCell(a: Vec3, b: Vec3): boolean {
  return a[0] === b[0] && a[1] === b[1] && a[2] === b[2];
}
