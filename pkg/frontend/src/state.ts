// Per-browser session state: a persistent anonymous client id plus the
// vote each answer position currently holds for the displayed question.

import { QueryResult } from './api.js';

const CLIENT_ID_KEY = 'asksci_client_id';

function randomToken(): string {
    const bytes = new Uint8Array(16);
    crypto.getRandomValues(bytes);
    return Array.from(bytes, (b) => b.toString(16).padStart(2, '0')).join('');
}

export function getClientId(storage: Storage): string {
    let id = storage.getItem(CLIENT_ID_KEY);
    if (!id) {
        id = randomToken();
        storage.setItem(CLIENT_ID_KEY, id);
    }
    return id;
}

export class SessionState {
    clientId: string;
    current: QueryResult | null = null;
    votes: Map<number, boolean> = new Map();

    constructor(clientId: string) {
        this.clientId = clientId;
    }

    showResult(result: QueryResult): void {
        this.current = result;
        this.votes.clear();
    }

    setVote(position: number, helpful: boolean): void {
        this.votes.set(position, helpful);
    }

    voteFor(position: number): boolean | undefined {
        return this.votes.get(position);
    }
}
